//! Periodic rectangular grids with a normalized volume form and a Fourier
//! pseudo-spectral calculus.
//!
//! Node `j` along axis `a` sits at `j * L_a / N_a`. The quadrature weight of
//! every node is `1 / (N_1 ... N_d)`, so the constant field 1 integrates to
//! exactly 1. Fourier coefficients are normalized the same way: a field is
//! the sum of its coefficients times `exp(i k.x)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField, VectorField};

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

struct Inner {
    shape: Vec<usize>,
    lengths: Vec<f64>,
    len: usize,
    strides: Vec<usize>,
    plans: Vec<AxisPlan>,
    /// First-derivative wavenumbers per axis, Nyquist mode zeroed.
    kd: Vec<Vec<f64>>,
    /// |k|^2 including the Nyquist modes.
    ksq: Vec<f64>,
    /// Sum of squared first-derivative wavenumbers.
    kdsq: Vec<f64>,
    /// Modes kept by the 2/3 rule.
    retained: Vec<bool>,
    /// Modes in the top third of the retained band.
    tail: Vec<bool>,
}

/// A periodic lattice on a flat torus of dimension 1 to 3.
///
/// Cloning is cheap; FFT plans and wavenumber tables are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<Inner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("shape", &self.inner.shape)
            .field("lengths", &self.inner.lengths)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.shape == other.inner.shape && self.inner.lengths == other.inner.lengths)
    }
}

impl Grid {
    /// Builds a grid with the given points per axis and period lengths.
    pub fn new(shape: &[usize], lengths: &[f64]) -> Result<Self> {
        let dim = shape.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if lengths.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "{} period lengths for {dim} axes",
                lengths.len()
            )));
        }
        for (&n, &l) in shape.iter().zip(lengths) {
            if n < 16 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{n} points per axis; need a power of two >= 16"
                )));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("period length {l}")));
            }
        }

        let len: usize = shape.iter().product();
        let mut strides = vec![1; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }

        let mut planner = FftPlanner::new();
        let plans = shape
            .iter()
            .map(|&n| AxisPlan {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
            .collect();

        let mut kd = vec![vec![0.0; len]; dim];
        let mut ksq = vec![0.0; len];
        let mut kdsq = vec![0.0; len];
        let mut retained = vec![true; len];
        let mut tail = vec![false; len];
        for idx in 0..len {
            for a in 0..dim {
                let n = shape[a];
                let j = (idx / strides[a]) % n;
                let m = signed_mode(j, n);
                let k = 2.0 * PI / lengths[a] * m as f64;
                ksq[idx] += k * k;
                if 2 * j != n {
                    kd[a][idx] = k;
                    kdsq[idx] += k * k;
                }
                let am = m.unsigned_abs() as usize;
                if 3 * am > n {
                    retained[idx] = false;
                }
                if 9 * am > 2 * n {
                    tail[idx] = true;
                }
            }
        }

        Ok(Self {
            inner: Arc::new(Inner {
                shape: shape.to_vec(),
                lengths: lengths.to_vec(),
                len,
                strides,
                plans,
                kd,
                ksq,
                kdsq,
                retained,
                tail,
            }),
        })
    }

    /// Grid with every period equal to 2π.
    pub fn periodic(shape: &[usize]) -> Result<Self> {
        Self::new(shape, &vec![2.0 * PI; shape.len()])
    }

    pub fn dim(&self) -> usize {
        self.inner.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn lengths(&self) -> &[f64] {
        &self.inner.lengths
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    /// Quadrature weight of a single node.
    pub fn weight(&self) -> f64 {
        1.0 / self.inner.len as f64
    }

    /// Node spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.inner.lengths[axis] / self.inner.shape[axis] as f64
    }

    /// Smallest node spacing over all axes.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dim())
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dim() {
            Ok(())
        } else {
            Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim(),
            })
        }
    }

    pub fn require_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected,
                got: self.dim(),
            })
        }
    }

    /// Integer index of node `flat` along `axis`.
    pub fn index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.inner.strides[axis]) % self.inner.shape[axis]
    }

    /// Signed Fourier mode number of spectral slot `flat` along `axis`.
    pub fn mode(&self, flat: usize, axis: usize) -> i64 {
        signed_mode(self.index(flat, axis), self.inner.shape[axis])
    }

    /// Wavenumber scale `2π / L` along `axis`.
    pub fn base_wavenumber(&self, axis: usize) -> f64 {
        2.0 * PI / self.inner.lengths[axis]
    }

    /// Physical coordinates of node `flat`; unused axes are zero.
    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (a, xa) in x.iter_mut().enumerate().take(self.dim()) {
            *xa = self.index(flat, a) as f64 * self.spacing(a);
        }
        x
    }

    /// Samples `f` at every node.
    pub fn from_fn(&self, f: impl Fn(&[f64]) -> f64) -> ScalarField {
        let dim = self.dim();
        let data = (0..self.len())
            .map(|i| {
                let x = self.coords(i);
                f(&x[..dim])
            })
            .collect();
        ScalarField::from_raw(self.clone(), data)
    }

    /// Samples a complex function at every node.
    pub fn complex_from_fn(&self, f: impl Fn(&[f64]) -> Complex64) -> ComplexField {
        let dim = self.dim();
        let data = (0..self.len())
            .map(|i| {
                let x = self.coords(i);
                f(&x[..dim])
            })
            .collect();
        ComplexField::from_raw(self.clone(), data)
    }

    pub fn constant(&self, value: f64) -> ScalarField {
        ScalarField::from_raw(self.clone(), vec![value; self.len()])
    }

    pub fn zeros(&self) -> ScalarField {
        self.constant(0.0)
    }

    pub fn zero_vector(&self) -> VectorField {
        VectorField::from_components_unchecked((0..self.dim()).map(|_| self.zeros()).collect())
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(&self, axis: usize) -> Result<ScalarField> {
        self.check_axis(axis)?;
        Ok(self.from_fn(|x| x[axis]))
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// In-place forward transform producing normalized Fourier coefficients.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len());
        for axis in 0..self.dim() {
            self.transform_axis(data, axis, false);
        }
        let w = self.weight();
        for c in data.iter_mut() {
            *c *= w;
        }
    }

    /// In-place inverse of [`Grid::forward`].
    pub fn inverse(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len());
        for axis in 0..self.dim() {
            self.transform_axis(data, axis, true);
        }
    }

    fn transform_axis(&self, data: &mut [Complex64], axis: usize, inverse: bool) {
        let n = self.inner.shape[axis];
        let stride = self.inner.strides[axis];
        let plan = &self.inner.plans[axis];
        let fft = if inverse {
            &plan.inverse
        } else {
            &plan.forward
        };
        if stride == 1 {
            fft.process(data);
            return;
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let block = n * stride;
        for start in (0..data.len()).step_by(block) {
            for s in 0..stride {
                let base = start + s;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }

    /// Normalized Fourier coefficients of real node values.
    pub fn spectrum_of(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut data);
        data
    }

    /// Real part of the field synthesized from normalized coefficients.
    pub fn real_from_spectrum(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse(&mut spectrum);
        spectrum.into_iter().map(|c| c.re).collect()
    }

    /// First-derivative wavenumbers along `axis` (Nyquist zeroed).
    pub(crate) fn kd(&self, axis: usize) -> &[f64] {
        &self.inner.kd[axis]
    }

    /// |k|^2 with Nyquist modes included.
    pub(crate) fn ksq(&self) -> &[f64] {
        &self.inner.ksq
    }

    /// Symbol of div∘grad, which vanishes on Nyquist directions.
    pub(crate) fn kdsq(&self) -> &[f64] {
        &self.inner.kdsq
    }

    pub(crate) fn retained(&self) -> &[bool] {
        &self.inner.retained
    }

    pub(crate) fn tail(&self) -> &[bool] {
        &self.inner.tail
    }
}

fn signed_mode(j: usize, n: usize) -> i64 {
    if 2 * j >= n {
        j as i64 - n as i64
    } else {
        j as i64
    }
}

fn apply_real(
    grid: &Grid,
    values: &[f64],
    mut multiplier: impl FnMut(usize, Complex64) -> Complex64,
) -> Vec<f64> {
    let mut spec = grid.spectrum_of(values);
    for (i, c) in spec.iter_mut().enumerate() {
        *c = multiplier(i, *c);
    }
    grid.real_from_spectrum(spec)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl ScalarField {
    /// Normalized Fourier coefficients.
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        self.grid().spectrum_of(self.values())
    }

    /// Trigonometric interpolant sampled on a grid `factor` times finer per
    /// axis. A Nyquist coefficient is split evenly between `±N/2`.
    pub fn refined(&self, factor: usize) -> Result<ScalarField> {
        let grid = self.grid();
        let dim = grid.dim();
        let shape: Vec<usize> = grid.shape().iter().map(|&n| n * factor).collect();
        let fine = Grid::new(&shape, grid.lengths())?;
        let mut spectrum = vec![Complex64::new(0.0, 0.0); fine.len()];
        for (i, &c) in self.fourier_coefficients().iter().enumerate() {
            let mut targets = vec![(0usize, c)];
            for (a, &len) in shape.iter().enumerate().take(dim) {
                let n = grid.shape()[a] as i64;
                let m = grid.mode(i, a);
                let images: &[i64] = if m == -n / 2 { &[m, -m] } else { &[m] };
                let weight = 1.0 / images.len() as f64;
                let stride = fine.inner.strides[a];
                let n_fine = len as i64;
                targets = targets
                    .iter()
                    .flat_map(|&(idx, c)| {
                        images.iter().map(move |&k| {
                            let j = k.rem_euclid(n_fine) as usize;
                            (idx + j * stride, c * weight)
                        })
                    })
                    .collect();
            }
            for (idx, c) in targets {
                spectrum[idx] += c;
            }
        }
        Ok(ScalarField::from_raw(
            fine.clone(),
            fine.real_from_spectrum(spectrum),
        ))
    }

    /// Applies a Fourier multiplier given per spectral slot.
    pub fn apply_multiplier(&self, multiplier: impl Fn(usize) -> Complex64) -> ScalarField {
        let data = apply_real(self.grid(), self.values(), |i, c| c * multiplier(i));
        ScalarField::from_raw(self.grid().clone(), data)
    }

    /// Spectral partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Result<ScalarField> {
        self.grid().check_axis(axis)?;
        Ok(self.d(axis))
    }

    pub(crate) fn d(&self, axis: usize) -> ScalarField {
        let kd = self.grid().kd(axis);
        let data = apply_real(self.grid(), self.values(), |i, c| c * I * kd[i]);
        ScalarField::from_raw(self.grid().clone(), data)
    }

    /// Spectral gradient; one forward transform shared by all components.
    pub fn gradient(&self) -> VectorField {
        let grid = self.grid();
        let spec = grid.spectrum_of(self.values());
        let comps = (0..grid.dim())
            .map(|a| {
                let kd = grid.kd(a);
                let s: Vec<Complex64> = spec.iter().zip(kd).map(|(c, &k)| c * I * k).collect();
                ScalarField::from_raw(grid.clone(), grid.real_from_spectrum(s))
            })
            .collect();
        VectorField::from_components_unchecked(comps)
    }

    pub fn laplacian(&self) -> ScalarField {
        let ksq = self.grid().ksq();
        let data = apply_real(self.grid(), self.values(), |i, c| -c * ksq[i]);
        ScalarField::from_raw(self.grid().clone(), data)
    }

    /// Zero-mean solution `u` of `Δu = self`.
    pub fn inverse_laplacian(&self) -> Result<ScalarField> {
        let mean = self.integrate();
        if mean.abs() >= 1e-10 {
            return Err(Error::NonZeroMean(mean));
        }
        let ksq = self.grid().ksq();
        let data = apply_real(self.grid(), self.values(), |i, c| {
            if ksq[i] == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                -c / ksq[i]
            }
        });
        Ok(ScalarField::from_raw(self.grid().clone(), data))
    }

    /// Pseudo-inverse of div∘grad: zero on modes that operator annihilates.
    pub(crate) fn inverse_div_grad(&self) -> ScalarField {
        let kdsq = self.grid().kdsq();
        let data = apply_real(self.grid(), self.values(), |i, c| {
            if kdsq[i] == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                -c / kdsq[i]
            }
        });
        ScalarField::from_raw(self.grid().clone(), data)
    }

    /// Removes the modes annihilated by div∘grad (the mean and pure Nyquist combinations).
    pub(crate) fn project_div_grad_range(&self) -> ScalarField {
        let kdsq = self.grid().kdsq();
        let data = apply_real(self.grid(), self.values(), |i, c| {
            if kdsq[i] == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        });
        ScalarField::from_raw(self.grid().clone(), data)
    }

    /// 2/3-rule truncation.
    pub fn dealias(&self) -> ScalarField {
        let keep = self.grid().retained();
        let data = apply_real(self.grid(), self.values(), |i, c| {
            if keep[i] {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        ScalarField::from_raw(self.grid().clone(), data)
    }

    /// Fraction of the fluctuation energy carried by the top third of the
    /// modes the 2/3 rule retains. Zero for constant fields.
    pub fn tail_fraction(&self) -> f64 {
        let spec = self.fourier_coefficients();
        let tail = self.grid().tail();
        let mut total = 0.0;
        let mut upper = 0.0;
        for (i, c) in spec.iter().enumerate().skip(1) {
            let e = c.norm_sqr();
            total += e;
            if tail[i] {
                upper += e;
            }
        }
        if total > 0.0 {
            upper / total
        } else {
            0.0
        }
    }

    /// Periodic antiderivative of a zero-mean field on a 1D grid.
    pub fn antiderivative(&self) -> Result<ScalarField> {
        self.grid().require_dim(1)?;
        let mean = self.integrate();
        if mean.abs() >= 1e-10 {
            return Err(Error::NonZeroMean(mean));
        }
        let kd = self.grid().kd(0);
        let data = apply_real(self.grid(), self.values(), |i, c| {
            if kd[i] == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c / (I * kd[i])
            }
        });
        Ok(ScalarField::from_raw(self.grid().clone(), data))
    }
}

impl VectorField {
    /// Spectral divergence.
    pub fn divergence(&self) -> ScalarField {
        let grid = self.grid().clone();
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (a, comp) in self.components().iter().enumerate() {
            let spec = grid.spectrum_of(comp.values());
            for ((s, c), &k) in acc.iter_mut().zip(&spec).zip(grid.kd(a)) {
                *s += c * I * k;
            }
        }
        ScalarField::from_raw(grid.clone(), grid.real_from_spectrum(acc))
    }

    /// Scalar vorticity `∂x v_y − ∂y v_x` of a planar field.
    pub fn curl_2d(&self) -> Result<ScalarField> {
        self.grid().require_dim(2)?;
        let c = self.components();
        Ok(&c[1].d(0) - &c[0].d(1))
    }

    /// Curl of a field on a 3D grid.
    pub fn curl(&self) -> Result<VectorField> {
        self.grid().require_dim(3)?;
        let c = self.components();
        Ok(VectorField::from_components_unchecked(vec![
            &c[2].d(1) - &c[1].d(2),
            &c[0].d(2) - &c[2].d(0),
            &c[1].d(0) - &c[0].d(1),
        ]))
    }

    pub fn dealias(&self) -> VectorField {
        VectorField::from_components_unchecked(
            self.components().iter().map(ScalarField::dealias).collect(),
        )
    }
}

impl ComplexField {
    /// Normalized Fourier coefficients.
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        let mut data = self.values().to_vec();
        self.grid().forward(&mut data);
        data
    }

    /// Applies a Fourier multiplier given per spectral slot.
    pub fn apply_multiplier(&self, multiplier: impl Fn(usize) -> Complex64) -> ComplexField {
        let grid = self.grid();
        let mut data = self.values().to_vec();
        grid.forward(&mut data);
        for (i, c) in data.iter_mut().enumerate() {
            *c *= multiplier(i);
        }
        grid.inverse(&mut data);
        ComplexField::from_raw(grid.clone(), data)
    }

    pub fn derivative(&self, axis: usize) -> Result<ComplexField> {
        self.grid().check_axis(axis)?;
        let kd = self.grid().kd(axis);
        Ok(self.apply_multiplier(|i| I * kd[i]))
    }

    /// Spectral gradient, one complex field per axis.
    pub fn gradient(&self) -> Vec<ComplexField> {
        let grid = self.grid();
        let mut spec = self.values().to_vec();
        grid.forward(&mut spec);
        (0..grid.dim())
            .map(|a| {
                let kd = grid.kd(a);
                let mut s: Vec<Complex64> = spec.iter().zip(kd).map(|(c, &k)| c * I * k).collect();
                grid.inverse(&mut s);
                ComplexField::from_raw(grid.clone(), s)
            })
            .collect()
    }

    pub fn laplacian(&self) -> ComplexField {
        let ksq = self.grid().ksq();
        self.apply_multiplier(|i| Complex64::new(-ksq[i], 0.0))
    }
}
