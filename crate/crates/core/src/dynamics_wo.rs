//! Time integrators on the Wasserstein-Otto side: Newton equations in
//! `(ρ, θ)`, Eulerian barotropic flow, fully compressible and relativistic 1D
//! flow, 2D incompressible Euler in vorticity form, heat flow and the viscous
//! Hamilton-Jacobi equation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::integrate::{check_tail, rk4};
use crate::potentials::Potential;
use crate::spaces::{Density, ThetaWO};

/// Density and potential of a gradient flow `v = ∇θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WOState {
    pub rho: Density,
    pub theta: ThetaWO,
}

impl WOState {
    pub fn new(rho: Density, theta: ScalarField) -> Result<Self> {
        rho.grid().ensure_same(theta.grid())?;
        Ok(Self {
            rho,
            theta: ThetaWO::new(theta),
        })
    }

    /// `½ ∫ ρ |∇θ|² μ + U(ρ)`.
    pub fn hamiltonian(&self, potential: &Potential) -> Result<f64> {
        let kinetic = 0.5 * self.theta.gradient().norm_sq().inner(&self.rho);
        Ok(kinetic + potential.value(&self.rho)?)
    }

    /// Largest `|∇θ|`.
    pub fn max_speed(&self) -> f64 {
        self.theta.gradient().norm_sq().max().sqrt()
    }
}

/// One RK4 step of `θ̇ = −½|∇θ|² − δU/δρ`, `ρ̇ = −div(ρ∇θ)`.
pub fn step_newton_wo(state: &WOState, potential: &Potential, dt: f64) -> Result<WOState> {
    let y = [state.rho.field().clone(), state.theta.field().clone()];
    let next = rk4(&y, dt, |y| {
        let rho = Density::evolved(y[0].clone())?;
        let grad = y[1].gradient();
        let vder = potential.vder(&rho)?;
        let rho_dot = -grad.mul_scalar(&rho).divergence().dealias();
        let theta_dot = (grad.norm_sq().scale(-0.5) - vder).dealias();
        Ok(vec![rho_dot, theta_dot])
    })?;
    let [rho, theta]: [ScalarField; 2] = next.try_into().expect("two fields");
    check_tail(&[&rho, &theta])?;
    WOState::new(Density::evolved(rho)?, theta)
}

/// Velocity and density of a compressible barotropic flow.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerianState {
    pub v: VectorField,
    pub rho: Density,
}

impl EulerianState {
    pub fn new(v: VectorField, rho: Density) -> Result<Self> {
        v.grid().ensure_same(rho.grid())?;
        Ok(Self { v, rho })
    }

    /// Gradient flow `v = ∇θ`.
    pub fn from_potential(rho: Density, theta: &ScalarField) -> Result<Self> {
        Self::new(theta.gradient(), rho)
    }

    /// `½ ∫ ρ |v|² μ + U(ρ)`.
    pub fn energy(&self, potential: &Potential) -> Result<f64> {
        Ok(0.5 * self.v.norm_sq().inner(&self.rho) + potential.value(&self.rho)?)
    }

    /// Scalar vorticity (2D) or the L² norm of the curl (1D: zero, 3D: `‖curl v‖`).
    pub fn curl_norm(&self) -> Result<f64> {
        match self.v.grid().dim() {
            1 => Ok(0.0),
            2 => Ok(self.v.curl_2d()?.norm_l2()),
            _ => Ok(self.v.curl()?.norm_l2()),
        }
    }
}

/// Rotational form of `(v·∇)v + ∇w`: `∇(½|v|² + w) − v × curl v`.
fn eulerian_acceleration(v: &VectorField, work: &ScalarField) -> Result<VectorField> {
    let bernoulli = (v.norm_sq().scale(0.5) + work).gradient();
    let rot = match v.grid().dim() {
        1 => return Ok(bernoulli.scale(-1.0)),
        2 => {
            let omega = v.curl_2d()?;
            VectorField::from_components(vec![v.component(1) * &omega, -(v.component(0) * &omega)])?
        }
        _ => v.cross(&v.curl()?),
    };
    Ok(&rot - &bernoulli)
}

/// One RK4 step of `v̇ = −(v·∇)v − ∇ δU/δρ`, `ρ̇ = −div(ρv)`.
pub fn step_eulerian(
    state: &EulerianState,
    potential: &Potential,
    dt: f64,
) -> Result<EulerianState> {
    let dim = state.v.grid().dim();
    let mut y = vec![state.rho.field().clone()];
    y.extend(state.v.components().iter().cloned());
    let next = rk4(&y, dt, |y| {
        let rho = Density::evolved(y[0].clone())?;
        let v = VectorField::from_components(y[1..].to_vec())?;
        let vder = potential.vder(&rho)?;
        let acc = eulerian_acceleration(&v, &vder)?.dealias();
        let rho_dot = -v.mul_scalar(&rho).divergence().dealias();
        let mut out = vec![rho_dot];
        out.extend(acc.into_components());
        Ok(out)
    })?;
    let refs: Vec<&ScalarField> = next.iter().collect();
    check_tail(&refs)?;
    let v = VectorField::from_components(next[1..=dim].to_vec())?;
    EulerianState::new(v, Density::evolved(next[0].clone())?)
}

/// Internal energy per unit mass `e(ρ, σ)` with an entropy density `σ`.
#[derive(Clone, Debug, PartialEq)]
pub enum EntropicStateFunction {
    /// `e = ρ/2`.
    Shallow,
    /// `e = ρ^(a−1)`.
    Polytropic { exponent: f64 },
    /// `e = exp(σ/ρ) ρ^(a−1) / (a−1)`, so `P = exp(σ/ρ) ρ^a`.
    IdealGas { exponent: f64 },
}

impl EntropicStateFunction {
    pub fn energy(&self, rho: f64, sigma: f64) -> f64 {
        match *self {
            Self::Shallow => 0.5 * rho,
            Self::Polytropic { exponent } => rho.powf(exponent - 1.0),
            Self::IdealGas { exponent } => {
                (sigma / rho).exp() * rho.powf(exponent - 1.0) / (exponent - 1.0)
            }
        }
    }

    /// `P = ρ² ∂e/∂ρ + σρ ∂e/∂σ`.
    pub fn pressure(&self, rho: f64, sigma: f64) -> f64 {
        match *self {
            Self::Shallow => 0.5 * rho * rho,
            Self::Polytropic { exponent } => (exponent - 1.0) * rho.powf(exponent),
            Self::IdealGas { exponent } => (sigma / rho).exp() * rho.powf(exponent),
        }
    }
}

/// 1D velocity, density and entropy density.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    pub v: ScalarField,
    pub rho: Density,
    pub sigma: ScalarField,
}

impl FullState {
    pub fn new(v: ScalarField, rho: Density, sigma: ScalarField) -> Result<Self> {
        v.grid().require_dim(1)?;
        v.grid().ensure_same(rho.grid())?;
        v.grid().ensure_same(sigma.grid())?;
        Ok(Self { v, rho, sigma })
    }

    /// `½ ∫ ρ v² μ + ∫ e(ρ, σ) ρ μ`.
    pub fn energy(&self, e: &EntropicStateFunction) -> f64 {
        let internal = self
            .rho
            .zip_map(&self.sigma, |r, s| e.energy(r, s) * r)
            .integrate();
        0.5 * (&self.v * &self.v).inner(&self.rho) + internal
    }
}

/// One RK4 step of the fully compressible 1D system
/// `v̇ = −v v_x − P_x/ρ`, `ρ̇ = −(ρv)_x`, `σ̇ = −(σv)_x`.
pub fn step_full_compressible(
    state: &FullState,
    e: &EntropicStateFunction,
    dt: f64,
) -> Result<FullState> {
    let y = [
        state.v.clone(),
        state.rho.field().clone(),
        state.sigma.clone(),
    ];
    let next = rk4(&y, dt, |y| {
        let (v, rho, sigma) = (&y[0], &y[1], &y[2]);
        let min = rho.min();
        if min <= crate::spaces::POSITIVITY_FLOOR {
            return Err(Error::Positivity { min });
        }
        let p = rho.zip_map(sigma, |r, s| e.pressure(r, s));
        let v_dot = -((v * v).scale(0.5).d(0) + p.d(0).zip_map(rho, |dp, r| dp / r));
        Ok(vec![
            v_dot.dealias(),
            -(rho * v).d(0).dealias(),
            -(sigma * v).d(0).dealias(),
        ])
    })?;
    let [v, rho, sigma]: [ScalarField; 3] = next.try_into().expect("three fields");
    check_tail(&[&v, &rho, &sigma])?;
    FullState::new(v, Density::evolved(rho)?, sigma)
}

/// 1D momentum density and density of a relativistic flow.
#[derive(Clone, Debug, PartialEq)]
pub struct RelState {
    pub m: ScalarField,
    pub rho: Density,
}

impl RelState {
    pub fn new(m: ScalarField, rho: Density) -> Result<Self> {
        m.grid().require_dim(1)?;
        m.grid().ensure_same(rho.grid())?;
        Ok(Self { m, rho })
    }

    /// Starts from a velocity field: `m = ρ v / √(1 − v²/c²)`.
    pub fn from_velocity(rho: Density, v: &ScalarField, c: f64) -> Result<Self> {
        if v.max_abs() >= c {
            return Err(Error::InvalidArgument(format!(
                "speed {} not below light speed {c}",
                v.max_abs()
            )));
        }
        let m = v.zip_map(&rho, |u, r| r * u / (1.0 - u * u / (c * c)).sqrt());
        Self::new(m, rho)
    }

    /// `v = m / √(ρ² + m²/c²)`.
    pub fn velocity(&self, c: f64) -> ScalarField {
        rel_velocity(&self.m, &self.rho, c)
    }

    /// `∫ c² √(ρ² + m²/c²) μ`.
    pub fn hamiltonian(&self, c: f64) -> f64 {
        self.m
            .zip_map(&self.rho, |m, r| c * c * (r * r + m * m / (c * c)).sqrt())
            .integrate()
    }
}

fn rel_velocity(m: &ScalarField, rho: &ScalarField, c: f64) -> ScalarField {
    m.zip_map(rho, |m, r| m / (r * r + m * m / (c * c)).sqrt())
}

/// One RK4 step of the relativistic system
/// `ṁ = −(vm)_x − m v_x − ρ ∂_x(δH/δρ)`, `ρ̇ = −(ρv)_x`. The constant `c²`
/// is removed from `δH/δρ` analytically to avoid cancellation.
pub fn step_relativistic(state: &RelState, c: f64, dt: f64) -> Result<RelState> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidArgument(format!("light speed {c}")));
    }
    let y = [state.m.clone(), state.rho.field().clone()];
    let next = rk4(&y, dt, |y| {
        let (m, rho) = (&y[0], &y[1]);
        let min = rho.min();
        if min <= crate::spaces::POSITIVITY_FLOOR {
            return Err(Error::Positivity { min });
        }
        let v = rel_velocity(m, rho, c);
        let pot = m.zip_map(rho, |m, r| {
            let u = m / r;
            let s = (1.0 + u * u / (c * c)).sqrt();
            -u * u / (s * (1.0 + s))
        });
        let m_dot = -((&v * m).d(0) + m * &v.d(0) + rho * &pot.d(0));
        Ok(vec![m_dot.dealias(), -(rho * &v).d(0).dealias()])
    })?;
    let [m, rho]: [ScalarField; 2] = next.try_into().expect("two fields");
    check_tail(&[&m, &rho])?;
    RelState::new(m, Density::evolved(rho)?)
}

/// Zero-mean vorticity of a 2D incompressible flow.
#[derive(Clone, Debug, PartialEq)]
pub struct Vorticity2D(ScalarField);

impl Vorticity2D {
    pub fn new(omega: ScalarField) -> Result<Self> {
        omega.grid().require_dim(2)?;
        let mean = omega.integrate();
        if mean.abs() > 1e-10 {
            return Err(Error::NonZeroMean(mean));
        }
        Ok(Self(omega))
    }

    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    /// Stream function `Δ⁻¹ω`.
    pub fn stream_function(&self) -> ScalarField {
        self.0
            .zero_mean()
            .inverse_laplacian()
            .expect("vorticity has zero mean")
    }

    /// `v = (−∂_y ψ, ∂_x ψ)`.
    pub fn velocity(&self) -> VectorField {
        let psi = self.stream_function();
        VectorField::from_components_unchecked(vec![-psi.d(1), psi.d(0)])
    }

    /// `½ ∫ |v|² μ`.
    pub fn energy(&self) -> f64 {
        0.5 * self.velocity().norm_sq().integrate()
    }
}

/// One RK4 step of `ω̇ = −v·∇ω` with `v` from the stream function.
pub fn step_euler2d(omega: &Vorticity2D, dt: f64) -> Result<Vorticity2D> {
    let next = rk4(std::slice::from_ref(&omega.0), dt, |y| {
        let w = Vorticity2D(y[0].zero_mean());
        let v = w.velocity();
        Ok(vec![(-v.dot(&y[0].gradient())).dealias()])
    })?;
    check_tail(&[&next[0]])?;
    Vorticity2D::new(next[0].zero_mean())
}

/// Exact spectral step of the heat equation `ρ̇ = Δρ`, the Wasserstein-Otto
/// gradient flow of the entropy.
pub fn heat_flow_entropy(rho: &Density, dt: f64) -> Result<Density> {
    let ksq = rho.grid().ksq();
    let out = rho.apply_multiplier(|i| Complex64::new((-ksq[i] * dt).exp(), 0.0));
    Density::evolved(out)
}

/// One integrating-factor RK4 step of `θ̇ = −½|∇θ|² + γΔθ`; the diffusion is
/// propagated exactly.
pub fn step_hj_viscous(theta: &ThetaWO, gamma: f64, dt: f64) -> ThetaWO {
    let ksq = theta.grid().ksq();
    let half = |f: &ScalarField| {
        f.apply_multiplier(|i| Complex64::new((-gamma * ksq[i] * 0.5 * dt).exp(), 0.0))
    };
    let nonlinear = |f: &ScalarField| f.gradient().norm_sq().scale(-0.5).dealias();
    let theta = theta.field();

    let k1 = nonlinear(theta);
    let k2 = nonlinear(&half(&theta.axpy(0.5 * dt, &k1)));
    let e_theta = half(theta);
    let k3 = nonlinear(&e_theta.axpy(0.5 * dt, &k2));
    let k4 = nonlinear(&half(&e_theta).axpy(dt, &half(&k3)));
    let combined = half(&half(&k1)) + half(&(&k2 + &k3)).scale(2.0) + k4;
    ThetaWO::new(half(&e_theta).axpy(dt / 6.0, &combined))
}
