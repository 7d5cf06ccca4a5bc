//! The manifold of probability densities with its Fisher-Rao and
//! Wasserstein-Otto geometries, plus the unit sphere of wave functions with
//! its Fubini-Study metric.

use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField};
use crate::grid::Grid;
use crate::potentials::Potential;

/// Smallest admissible density value.
pub const POSITIVITY_FLOOR: f64 = 1e-8;
/// Mass tolerance for user-supplied densities and wave-function norms.
pub const MASS_TOLERANCE: f64 = 1e-10;
/// Mass tolerance for densities produced by time integration.
pub const EVOLVED_MASS_TOLERANCE: f64 = 1e-8;
/// Relative residual at which the weighted Poisson solver stops.
pub const POISSON_TOLERANCE: f64 = 1e-10;
pub const POISSON_MAX_ITERATIONS: usize = 500;
/// Tolerance on the horizontality condition `∫ θ̇ ρ μ = 0`.
pub const GAUGE_TOLERANCE: f64 = 1e-8;

/// A positive field of unit mass.
#[derive(Clone, Debug, PartialEq)]
pub struct Density(ScalarField);

impl Density {
    pub fn new(field: ScalarField) -> Result<Self> {
        Self::checked(field, MASS_TOLERANCE)
    }

    /// Rescales a positive field to unit mass.
    pub fn normalized(field: ScalarField) -> Result<Self> {
        let mass = field.integrate();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Mass(mass));
        }
        Self::new(field.scale(1.0 / mass))
    }

    /// Wraps the output of a time step, where mass has only been conserved
    /// up to integration error.
    pub fn evolved(field: ScalarField) -> Result<Self> {
        Self::checked(field, EVOLVED_MASS_TOLERANCE)
    }

    fn checked(field: ScalarField, mass_tolerance: f64) -> Result<Self> {
        if !field.is_finite() {
            return Err(Error::NonFinite);
        }
        let min = field.min();
        if min <= POSITIVITY_FLOOR {
            return Err(Error::Positivity { min });
        }
        let mass = field.integrate();
        if (mass - 1.0).abs() > mass_tolerance {
            return Err(Error::Mass(mass));
        }
        Ok(Self(field))
    }

    pub fn uniform(grid: &Grid) -> Self {
        Self(grid.constant(1.0))
    }

    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }

    pub fn mass(&self) -> f64 {
        self.0.integrate()
    }
}

impl Deref for Density {
    type Target = ScalarField;
    fn deref(&self) -> &ScalarField {
        &self.0
    }
}

/// A zero-mean field: a tangent vector to the density manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentDensity(ScalarField);

impl TangentDensity {
    pub fn new(field: ScalarField) -> Result<Self> {
        let mean = field.integrate();
        if mean.abs() > MASS_TOLERANCE {
            return Err(Error::NonZeroMean(mean));
        }
        Ok(Self(field))
    }

    /// Subtracts the mean.
    pub fn projected(field: &ScalarField) -> Self {
        Self(field.zero_mean())
    }

    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }
}

impl Deref for TangentDensity {
    type Target = ScalarField;
    fn deref(&self) -> &ScalarField {
        &self.0
    }
}

/// Potential field in the transport gauge `∫ θ μ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaWO(ScalarField);

impl ThetaWO {
    /// Subtracts the mean.
    pub fn new(field: ScalarField) -> Self {
        Self(field.zero_mean())
    }

    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }
}

impl Deref for ThetaWO {
    type Target = ScalarField;
    fn deref(&self) -> &ScalarField {
        &self.0
    }
}

/// Potential field in the gauge `∫ θ ρ μ = 0` of a paired density.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaFR(ScalarField);

impl ThetaFR {
    /// Shifts `field` by a constant so that `∫ θ ρ μ = 0`.
    pub fn new(field: ScalarField, rho: &Density) -> Result<Self> {
        field.grid().ensure_same(rho.grid())?;
        let shift = field.inner(rho) / rho.mass();
        Ok(Self(field.shift(-shift)))
    }

    /// Re-applies the gauge after the paired density has changed.
    pub fn regauge(self, rho: &Density) -> Result<Self> {
        Self::new(self.0, rho)
    }

    /// `∫ θ ρ μ`, which vanishes for a correctly gauged pair.
    pub fn gauge_residual(&self, rho: &Density) -> f64 {
        self.0.inner(rho)
    }

    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }
}

impl Deref for ThetaFR {
    type Target = ScalarField;
    fn deref(&self) -> &ScalarField {
        &self.0
    }
}

/// A complex field of unit L² norm.
///
/// The projective gauge (value at node 0 real and nonnegative) is applied by
/// [`WaveFunction::gauged`] and by the Madelung transform; time steppers keep
/// the global phase they produce.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction(ComplexField);

impl WaveFunction {
    pub fn new(field: ComplexField) -> Result<Self> {
        let n = field.norm_sq();
        if (n - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Norm(n));
        }
        Ok(Self(field))
    }

    /// Rescales to unit norm.
    pub fn normalized(field: ComplexField) -> Result<Self> {
        let n = field.norm_sq();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Norm(n));
        }
        Ok(Self(field.scale(Complex64::new(1.0 / n.sqrt(), 0.0))))
    }

    pub(crate) fn from_unit(field: ComplexField) -> Self {
        Self(field)
    }

    /// Representative of the projective class whose value at node 0 is real
    /// and nonnegative.
    pub fn gauged(&self) -> Self {
        let c = self.0.values()[0];
        let r = c.norm();
        if r == 0.0 {
            return self.clone();
        }
        Self(self.0.scale(c.conj() / r))
    }

    pub fn field(&self) -> &ComplexField {
        &self.0
    }

    pub fn into_field(self) -> ComplexField {
        self.0
    }
}

impl Deref for WaveFunction {
    type Target = ComplexField;
    fn deref(&self) -> &ComplexField {
        &self.0
    }
}

/// `∫ (a/ρ)(b/ρ) ρ μ`.
pub fn fr_metric(rho: &Density, a: &ScalarField, b: &ScalarField) -> Result<f64> {
    rho.grid().ensure_same(a.grid())?;
    rho.grid().ensure_same(b.grid())?;
    let w = rho.grid().weight();
    Ok(rho
        .values()
        .iter()
        .zip(a.values())
        .zip(b.values())
        .map(|((r, x), y)| x * y / r)
        .sum::<f64>()
        * w)
}

/// `-div(ρ ∇u)`, the operator inverted by [`weighted_poisson_solve`] up to sign.
fn neg_weighted_laplacian(rho: &ScalarField, u: &ScalarField) -> ScalarField {
    -u.gradient().mul_scalar(rho).divergence()
}

/// Solves `div(ρ∇θ) = g` for zero-mean `θ` by preconditioned conjugate
/// gradients, using the constant-coefficient spectral inverse as preconditioner.
pub fn weighted_poisson_solve(rho: &Density, g: &ScalarField) -> Result<ThetaWO> {
    rho.grid().ensure_same(g.grid())?;
    let mean = g.integrate();
    if mean.abs() >= 1e-10 {
        return Err(Error::NonZeroMean(mean));
    }
    let rho = rho.field();
    let b = -g.project_div_grad_range();
    let b_norm = b.norm_l2();
    if b_norm == 0.0 {
        return Ok(ThetaWO::new(g.grid().zeros()));
    }
    let precondition = |r: &ScalarField| -r.inverse_div_grad();

    let mut x = g.grid().zeros();
    let mut r = b.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = r.inner(&z);
    let mut residual = 1.0;
    for _ in 0..POISSON_MAX_ITERATIONS {
        let ap = neg_weighted_laplacian(rho, &p);
        let alpha = rz / p.inner(&ap);
        x = x.axpy(alpha, &p);
        r = r.axpy(-alpha, &ap);
        residual = r.norm_l2() / b_norm;
        if residual < POISSON_TOLERANCE {
            return Ok(ThetaWO::new(x));
        }
        z = precondition(&r);
        let rz_next = r.inner(&z);
        p = z.axpy(rz_next / rz, &p);
        rz = rz_next;
    }
    Err(Error::NoConvergence {
        residual,
        iterations: POISSON_MAX_ITERATIONS,
    })
}

/// Wasserstein-Otto inner product: `∫ θ_a b μ` where `div(ρ∇θ_a) = −a`.
pub fn wo_metric(rho: &Density, a: &ScalarField, b: &ScalarField) -> Result<f64> {
    rho.grid().ensure_same(b.grid())?;
    let theta = weighted_poisson_solve(rho, &-a)?;
    Ok(theta.inner(b))
}

/// Wasserstein-Otto gradient `−div(ρ ∇ δU/δρ)`.
pub fn wo_gradient(potential: &Potential, rho: &Density) -> Result<TangentDensity> {
    let vder = potential.vder(rho)?;
    Ok(TangentDensity::projected(&neg_weighted_laplacian(
        rho, &vder,
    )))
}

/// Fisher-Rao gradient `(δU/δρ − λ) ρ` with `λ` fixing zero mean.
pub fn fr_gradient(potential: &Potential, rho: &Density) -> Result<TangentDensity> {
    let vder = potential.vder(rho)?;
    let lambda = vder.inner(rho) / rho.mass();
    Ok(TangentDensity::projected(
        &(vder.shift(-lambda) * rho.field()),
    ))
}

/// `√ρ`, a point on the unit sphere of L².
pub fn sqrt_map(rho: &Density) -> ScalarField {
    rho.map(f64::sqrt)
}

/// Differential of [`sqrt_map`]: `a / (2√ρ)`.
pub fn sqrt_map_differential(rho: &Density, a: &ScalarField) -> Result<ScalarField> {
    rho.grid().ensure_same(a.grid())?;
    Ok(a.zip_map(rho, |x, r| x / (2.0 * r.sqrt())))
}

/// Inverse of [`sqrt_map`] on positive unit-norm fields.
pub fn sqrt_map_inverse(f: &ScalarField) -> Result<Density> {
    let min = f.min();
    if min <= 0.0 {
        return Err(Error::Positivity { min });
    }
    let norm = f.inner(f);
    if (norm - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::Norm(norm));
    }
    Density::new(f.map(|v| v * v))
}

/// Bhattacharyya coefficient `∫ √(ρ0 ρ1) μ` clamped to `[0, 1]`.
fn affinity(rho0: &Density, rho1: &Density) -> Result<f64> {
    rho0.grid().ensure_same(rho1.grid())?;
    let c = rho0.zip_map(rho1, |a, b| (a * b).sqrt()).integrate();
    if c > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "affinity {c} exceeds 1; inputs are not unit-mass densities"
        )));
    }
    Ok(c.min(1.0))
}

/// Fisher-Rao distance `2 arccos ∫ √(ρ0 ρ1) μ`.
pub fn fr_distance(rho0: &Density, rho1: &Density) -> Result<f64> {
    Ok(2.0 * affinity(rho0, rho1)?.acos())
}

/// Point at parameter `t ∈ [0, 1]` on the Fisher-Rao geodesic from `rho0`
/// to `rho1`: the square of the spherical interpolation of the roots.
pub fn fr_geodesic(rho0: &Density, rho1: &Density, t: f64) -> Result<Density> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("geodesic parameter {t}")));
    }
    let angle = affinity(rho0, rho1)?.acos();
    if angle < 1e-12 {
        return Ok(rho0.clone());
    }
    let s = angle.sin();
    let (c0, c1) = (((1.0 - t) * angle).sin() / s, (t * angle).sin() / s);
    let f = rho0.zip_map(rho1, |a, b| c0 * a.sqrt() + c1 * b.sqrt());
    Density::new(f.map(|v| v * v))
}

/// Sasaki lift of the Fisher-Rao metric to pairs `(ρ̇, θ̇)` with `∫ θ̇ ρ μ = 0`.
pub fn sasaki_fr_metric(
    rho: &Density,
    first: (&ScalarField, &ScalarField),
    second: (&ScalarField, &ScalarField),
) -> Result<f64> {
    for f in [first.0, first.1, second.0, second.1] {
        rho.grid().ensure_same(f.grid())?;
    }
    for theta_dot in [first.1, second.1] {
        let g = theta_dot.inner(rho);
        if g.abs() > GAUGE_TOLERANCE {
            return Err(Error::Gauge(g));
        }
    }
    let w = rho.grid().weight();
    let r = rho.values();
    let (a1, t1) = (first.0.values(), first.1.values());
    let (a2, t2) = (second.0.values(), second.1.values());
    let sum: f64 = (0..r.len())
        .map(|i| a1[i] * a2[i] / r[i] + t1[i] * t2[i] * r[i])
        .sum();
    Ok(sum * w)
}

/// Polarized Fubini-Study form at a unit `ψ`:
/// `Re⟨a, b⟩ − Re(⟨a, ψ⟩⟨ψ, b⟩)`.
pub fn fubini_study_metric(psi: &WaveFunction, a: &ComplexField, b: &ComplexField) -> Result<f64> {
    psi.grid().ensure_same(a.grid())?;
    psi.grid().ensure_same(b.grid())?;
    let ab = a.inner(b);
    let a_psi = a.inner(psi);
    let psi_b = psi.inner(b);
    Ok(ab.re - (a_psi * psi_b).re)
}

/// Fubini-Study distance `arccos |⟨ψ, φ⟩|` between projective classes.
pub fn fubini_study_distance(psi: &WaveFunction, phi: &WaveFunction) -> Result<f64> {
    psi.grid().ensure_same(phi.grid())?;
    Ok(psi.inner(phi).norm().min(1.0).acos())
}
