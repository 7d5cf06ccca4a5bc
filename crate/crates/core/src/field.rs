//! Node-valued fields on a [`Grid`] and their pointwise algebra.
//!
//! Binary operations between fields assume a common grid and panic otherwise;
//! the public entry points of the geometric modules check grids up front and
//! report [`Error::GridMismatch`] instead.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Real values at the nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<f64>,
}

impl ScalarField {
    /// Wraps node values, checking length and finiteness.
    pub fn new(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, data })
    }

    pub(crate) fn from_raw(grid: Grid, data: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), data.len());
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Quadrature `Σ w f` with the normalized weight.
    pub fn integrate(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.weight()
    }

    /// Same as [`ScalarField::integrate`]; the volume is 1.
    pub fn mean(&self) -> f64 {
        self.integrate()
    }

    /// `∫ f g μ`.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.weight()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest pointwise difference to `other`.
    pub fn linf_distance(&self, other: &ScalarField) -> f64 {
        (self - other).max_abs()
    }

    pub fn l2_distance(&self, other: &ScalarField) -> f64 {
        (self - other).norm_l2()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        Self::from_raw(self.grid.clone(), self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self::from_raw(
            self.grid.clone(),
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        self.map(|v| s * v)
    }

    pub fn shift(&self, c: f64) -> ScalarField {
        self.map(|v| v + c)
    }

    /// The field minus its mean.
    pub fn zero_mean(&self) -> ScalarField {
        self.shift(-self.mean())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &ScalarField) -> ScalarField {
        self.zip_map(other, |a, b| a + s * b)
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_raw(
            self.grid.clone(),
            self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                self.zip_map(rhs, |a, b| a $op b)
            }
        }
        impl $tr<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                (&self).$method(rhs)
            }
        }
        impl $tr<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(rhs)
    }
}

impl Mul<f64> for ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// Complex values at the nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, data })
    }

    pub(crate) fn from_raw(grid: Grid, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), data.len());
        Self { grid, data }
    }

    /// Combines real and imaginary parts.
    pub fn from_parts(re: &ScalarField, im: &ScalarField) -> Result<Self> {
        re.grid().ensure_same(im.grid())?;
        Ok(Self::from_raw(
            re.grid().clone(),
            re.values()
                .iter()
                .zip(im.values())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        ))
    }

    /// `amplitude * exp(i phase)` pointwise.
    pub fn from_polar(amplitude: &ScalarField, phase: &ScalarField) -> Result<Self> {
        amplitude.grid().ensure_same(phase.grid())?;
        Ok(Self::from_raw(
            amplitude.grid().clone(),
            amplitude
                .values()
                .iter()
                .zip(phase.values())
                .map(|(&r, &p)| Complex64::from_polar(r, p))
                .collect(),
        ))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.data
    }

    pub fn re(&self) -> ScalarField {
        ScalarField::from_raw(self.grid.clone(), self.data.iter().map(|c| c.re).collect())
    }

    pub fn im(&self) -> ScalarField {
        ScalarField::from_raw(self.grid.clone(), self.data.iter().map(|c| c.im).collect())
    }

    /// Pointwise `|ψ|²`.
    pub fn abs_sq(&self) -> ScalarField {
        ScalarField::from_raw(
            self.grid.clone(),
            self.data.iter().map(|c| c.norm_sqr()).collect(),
        )
    }

    pub fn abs(&self) -> ScalarField {
        ScalarField::from_raw(
            self.grid.clone(),
            self.data.iter().map(|c| c.norm()).collect(),
        )
    }

    pub fn conj(&self) -> ComplexField {
        self.map(|c| c.conj())
    }

    /// `∫ f conj(g) μ`.
    pub fn inner(&self, other: &ComplexField) -> Complex64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.grid.weight()
    }

    /// `∫ |ψ|² μ`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.weight()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn min_abs(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, v| m.min(v.norm()))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexField {
        Self::from_raw(self.grid.clone(), self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> ComplexField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self::from_raw(
            self.grid.clone(),
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> ComplexField {
        self.map(|v| s * v)
    }

    /// Pointwise product with a real field.
    pub fn mul_real(&self, other: &ScalarField) -> ComplexField {
        assert_eq!(&self.grid, other.grid(), "grid mismatch");
        Self::from_raw(
            self.grid.clone(),
            self.data
                .iter()
                .zip(other.values())
                .map(|(&a, &b)| a * b)
                .collect(),
        )
    }

    pub fn linf_distance(&self, other: &ComplexField) -> f64 {
        self.zip_map(other, |a, b| a - b).max_abs()
    }
}

macro_rules! complex_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ComplexField> for &ComplexField {
            type Output = ComplexField;
            fn $method(self, rhs: &ComplexField) -> ComplexField {
                self.zip_map(rhs, |a, b| a $op b)
            }
        }
        impl $tr<ComplexField> for ComplexField {
            type Output = ComplexField;
            fn $method(self, rhs: ComplexField) -> ComplexField {
                (&self).$method(&rhs)
            }
        }
    };
}

complex_binop!(Add, add, +);
complex_binop!(Sub, sub, -);
complex_binop!(Mul, mul, *);

/// A vector field with one component per grid axis.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<ScalarField>,
}

impl VectorField {
    /// Builds a vector field, checking the component count and grids.
    pub fn from_components(comps: Vec<ScalarField>) -> Result<Self> {
        let first = comps
            .first()
            .ok_or_else(|| Error::InvalidArgument("vector field with no components".into()))?;
        let grid = first.grid().clone();
        if comps.len() != grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} components on a {}-dimensional grid",
                comps.len(),
                grid.dim()
            )));
        }
        for c in &comps {
            grid.ensure_same(c.grid())?;
        }
        Ok(Self { comps })
    }

    pub(crate) fn from_components_unchecked(comps: Vec<ScalarField>) -> Self {
        Self { comps }
    }

    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.comps[axis]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.comps
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> VectorField {
        Self::from_components_unchecked(self.comps.iter().map(f).collect())
    }

    pub fn zip_components(
        &self,
        other: &VectorField,
        f: impl Fn(&ScalarField, &ScalarField) -> ScalarField,
    ) -> VectorField {
        Self::from_components_unchecked(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &VectorField) -> ScalarField {
        let mut acc = self.grid().zeros();
        for (a, b) in self.comps.iter().zip(&other.comps) {
            acc = acc + a * b;
        }
        acc
    }

    /// Pointwise `|v|²`.
    pub fn norm_sq(&self) -> ScalarField {
        self.dot(self)
    }

    /// `(∫ |v|² μ)^{1/2}`.
    pub fn norm_l2(&self) -> f64 {
        self.norm_sq().integrate().sqrt()
    }

    pub fn scale(&self, s: f64) -> VectorField {
        self.map_components(|c| c.scale(s))
    }

    /// Multiplies every component by a scalar field.
    pub fn mul_scalar(&self, f: &ScalarField) -> VectorField {
        self.map_components(|c| c * f)
    }

    pub fn axpy(&self, s: f64, other: &VectorField) -> VectorField {
        self.zip_components(other, |a, b| a.axpy(s, b))
    }

    /// Pointwise cross product on a 3D grid.
    pub fn cross(&self, other: &VectorField) -> VectorField {
        let (a, b) = (&self.comps, &other.comps);
        Self::from_components_unchecked(vec![
            &a[1] * &b[2] - &a[2] * &b[1],
            &a[2] * &b[0] - &a[0] * &b[2],
            &a[0] * &b[1] - &a[1] * &b[0],
        ])
    }

    pub fn linf_distance(&self, other: &VectorField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.linf_distance(b))
            .fold(0.0, f64::max)
    }

    pub fn l2_distance(&self, other: &VectorField) -> f64 {
        self.axpy(-1.0, other).norm_l2()
    }
}

impl Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        self.zip_components(rhs, |a, b| a + b)
    }
}

impl Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        self.zip_components(rhs, |a, b| a - b)
    }
}
