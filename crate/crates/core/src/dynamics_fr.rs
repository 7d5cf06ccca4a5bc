//! Fisher-Rao side: Newton equations on densities, horizontal μCH flow with
//! its Lagrangian reconstruction, the infinite-dimensional Neumann problem,
//! Klein-Gordon residuals and Sasaki-Fisher-Rao geodesics.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::integrate::rk4;
use crate::potentials::Potential;
use crate::spaces::{Density, ThetaFR, WaveFunction};
use crate::transforms::{madelung, madelung_inverse, madelung_pushforward};

/// Tolerance on the sphere constraint and tangency of [`NeumannState`].
pub const NEUMANN_TOLERANCE: f64 = 1e-9;

/// Density and potential in the gauge `∫ θ ρ μ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FRState {
    pub rho: Density,
    pub theta: ThetaFR,
}

impl FRState {
    /// Pairs `rho` with `theta` shifted into the gauge of `rho`.
    pub fn new(rho: Density, theta: ScalarField) -> Result<Self> {
        let theta = ThetaFR::new(theta, &rho)?;
        Ok(Self { rho, theta })
    }

    /// `½ ∫ θ² ρ μ + U(ρ)`.
    pub fn hamiltonian(&self, potential: &Potential) -> Result<f64> {
        Ok(0.5 * (&*self.theta * &*self.theta).inner(&self.rho) + potential.value(&self.rho)?)
    }

    /// Fisher-Rao speed `(∫ θ² ρ μ)^{1/2}` of `ρ̇ = θρ`.
    pub fn speed(&self) -> f64 {
        (&*self.theta * &*self.theta).inner(&self.rho).sqrt()
    }

    /// Multiplier `λ = ∫ (δU/δρ − ½θ²) ρ μ / ∫ ρ μ` enforcing mass conservation.
    pub fn multiplier(&self, potential: &Potential) -> Result<f64> {
        let vder = potential.vder(&self.rho)?;
        Ok(fr_multiplier(&self.rho, &self.theta, &vder))
    }
}

fn fr_multiplier(rho: &ScalarField, theta: &ScalarField, vder: &ScalarField) -> f64 {
    let integrand = vder.zip_map(theta, |u, t| u - 0.5 * t * t);
    integrand.inner(rho) / rho.integrate()
}

fn fr_rhs(y: &[ScalarField], potential: &Potential) -> Result<Vec<ScalarField>> {
    let rho = Density::evolved(y[0].clone())?;
    let theta = &y[1];
    let vder = potential.vder(&rho)?;
    let lambda = fr_multiplier(&rho, theta, &vder);
    let rho_dot = theta * rho.field();
    let theta_dot = theta.zip_map(&vder, |t, u| lambda - 0.5 * t * t - u);
    Ok(vec![rho_dot, theta_dot])
}

/// One RK4 step of `ρ̇ = θρ`, `θ̇ = λ − ½θ² − δU/δρ`, followed by the gauge
/// re-projection of `θ`.
pub fn step_newton_fr(state: &FRState, potential: &Potential, dt: f64) -> Result<FRState> {
    let y = [state.rho.field().clone(), state.theta.field().clone()];
    let next = rk4(&y, dt, |y| fr_rhs(y, potential))?;
    let [rho, theta]: [ScalarField; 2] = next.try_into().expect("two fields");
    FRState::new(Density::evolved(rho)?, theta)
}

/// Horizontal μCH flow on the circle: the Fisher-Rao geodesic flow.
pub fn step_much_horizontal(state: &FRState, dt: f64) -> Result<FRState> {
    state.rho.grid().require_dim(1)?;
    step_newton_fr(state, &Potential::Zero, dt)
}

/// A horizontal μCH state together with the displacement `φ − x` of a
/// Lagrangian flow map satisfying `φ_x = ρ`.
#[derive(Clone, Debug)]
pub struct MuChFlow {
    pub state: FRState,
    pub displacement: ScalarField,
}

fn pinned_antiderivative(f: &ScalarField) -> Result<ScalarField> {
    let a = f.zero_mean().antiderivative()?;
    let origin = a.values()[0];
    Ok(a.shift(-origin))
}

impl MuChFlow {
    /// Starts from the flow map with `φ(0) = 0` and `φ_x = ρ`.
    pub fn new(state: FRState) -> Result<Self> {
        state.rho.grid().require_dim(1)?;
        let displacement = pinned_antiderivative(&state.rho.shift(-1.0))?;
        Ok(Self {
            state,
            displacement,
        })
    }

    /// Advances the state and the flow map by `φ̇ = ∂⁻¹(θρ)`, pinned so that
    /// the node at the origin stays fixed.
    pub fn step(&self, dt: f64) -> Result<Self> {
        let y = [
            self.state.rho.field().clone(),
            self.state.theta.field().clone(),
            self.displacement.clone(),
        ];
        let next = rk4(&y, dt, |y| {
            let mut out = fr_rhs(&y[..2], &Potential::Zero)?;
            let flux = pinned_antiderivative(&out[0])?;
            out.push(flux);
            Ok(out)
        })?;
        let [rho, theta, displacement]: [ScalarField; 3] = next.try_into().expect("three fields");
        Ok(Self {
            state: FRState::new(Density::evolved(rho)?, theta)?,
            displacement,
        })
    }

    /// `φ_x = 1 + ∂_x(φ − x)`.
    pub fn flow_derivative(&self) -> ScalarField {
        self.displacement.d(0).shift(1.0)
    }
}

/// Position and velocity on the unit sphere of L².
#[derive(Clone, Debug, PartialEq)]
pub struct NeumannState {
    pub f: ScalarField,
    pub f_dot: ScalarField,
}

impl NeumannState {
    pub fn new(f: ScalarField, f_dot: ScalarField) -> Result<Self> {
        f.grid().ensure_same(f_dot.grid())?;
        let norm = f.inner(&f);
        if (norm - 1.0).abs() > NEUMANN_TOLERANCE {
            return Err(Error::Norm(norm));
        }
        let tangency = f.inner(&f_dot);
        if tangency.abs() > NEUMANN_TOLERANCE {
            return Err(Error::Constraint(format!("∫ f ḟ = {tangency:e}")));
        }
        Ok(Self { f, f_dot })
    }

    /// `λ = (∫ ḟ² μ + ∫ f Δf μ) / ∫ f² μ`.
    pub fn multiplier(&self) -> f64 {
        neumann_multiplier(&self.f, &self.f_dot)
    }

    /// `L = ½ ∫ ḟ² μ − ½ ∫ |∇f|² μ`.
    pub fn lagrangian(&self) -> f64 {
        0.5 * self.f_dot.inner(&self.f_dot) - 0.5 * self.f.gradient().norm_sq().integrate()
    }

    /// Conserved energy `½ ∫ ḟ² μ + ½ ∫ |∇f|² μ`.
    pub fn energy(&self) -> f64 {
        0.5 * self.f_dot.inner(&self.f_dot) + 0.5 * self.f.gradient().norm_sq().integrate()
    }
}

fn neumann_multiplier(f: &ScalarField, f_dot: &ScalarField) -> f64 {
    (f_dot.inner(f_dot) + f.inner(&f.laplacian())) / f.inner(f)
}

/// One RK4 step of `f̈ = Δf − λf`, then renormalization of `f` and
/// projection of `ḟ` onto the tangent space.
pub fn step_neumann(state: &NeumannState, dt: f64) -> Result<NeumannState> {
    let y = [state.f.clone(), state.f_dot.clone()];
    let next = rk4(&y, dt, |y| {
        let lambda = neumann_multiplier(&y[0], &y[1]);
        Ok(vec![y[1].clone(), y[0].laplacian().axpy(-lambda, &y[0])])
    })?;
    let [f, f_dot]: [ScalarField; 2] = next.try_into().expect("two fields");
    let f = f.scale(1.0 / f.norm_l2());
    let f_dot = f_dot.axpy(-f_dot.inner(&f), &f);
    NeumannState::new(f, f_dot)
}

/// `(∂_t f, ∂_x f)` of a space-time field with time along axis 1.
fn space_time_derivatives(f: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    f.grid().require_dim(2)?;
    Ok((f.d(1), f.d(0)))
}

/// `‖∂²_t f − ∂²_x f + m² f‖` for a space-time field with space along axis 0
/// and time along axis 1.
pub fn klein_gordon_residual(f: &ScalarField, mass_sq: f64) -> Result<f64> {
    let (ft, fx) = space_time_derivatives(f)?;
    let r = ft.d(1) - fx.d(0) + f.scale(mass_sq);
    Ok(r.norm_l2())
}

/// `V̄(f) = ½ ∫ (|∂_x f|² − (∂_t f)²)` over space-time.
pub fn klein_gordon_potential(f: &ScalarField) -> Result<f64> {
    let (ft, fx) = space_time_derivatives(f)?;
    Ok(0.5 * ((&fx * &fx) - (&ft * &ft)).integrate())
}

/// The two mass candidates `(2V̄, −2V̄)`. For a plane wave
/// `cos(kx − ωt)` the residual vanishes at the second, `ω² − k²`.
pub fn klein_gordon_masses(f: &ScalarField) -> Result<(f64, f64)> {
    let v = klein_gordon_potential(f)?;
    Ok((2.0 * v, -2.0 * v))
}

/// Sasaki-Fisher-Rao geodesic at time `t`, computed as the horizontal great
/// circle through the Madelung image (ħ = 2) of the initial data.
pub fn sasaki_geodesic(
    rho: &Density,
    theta: &ScalarField,
    rho_dot: &ScalarField,
    theta_dot: &ScalarField,
    t: f64,
) -> Result<(Density, ThetaFR)> {
    const HBAR: f64 = 2.0;
    let psi = madelung(rho, theta, HBAR)?;
    let tangent = madelung_pushforward(rho, theta, rho_dot, theta_dot, HBAR)?;
    let overlap = tangent.inner(&psi);
    let horizontal = &tangent - &psi.scale(overlap);
    let speed = horizontal.norm_sq().sqrt();
    if speed == 0.0 {
        return Ok((rho.clone(), ThetaFR::new(theta.clone(), rho)?));
    }
    let (c, s) = ((speed * t).cos(), (speed * t).sin() / speed);
    let along = psi.zip_map(&horizontal, |p, h| c * p + s * h);
    let (rho_t, theta_t) = madelung_inverse(&WaveFunction::new(along)?, HBAR)?;
    let theta_t = ThetaFR::new(theta_t.into_field(), &rho_t)?;
    Ok((rho_t, theta_t))
}
