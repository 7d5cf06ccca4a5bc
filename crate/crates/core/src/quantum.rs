//! Split-step solvers for Schrödinger-type equations, the heat equation and
//! the two-component incompressible Schrödinger flow.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField, VectorField};
use crate::potentials::Nonlinearity;
use crate::spaces::WaveFunction;

/// Largest per-step amplification kept by a backward heat step.
pub const MAX_HEAT_GAIN: f64 = 1e6;
/// Divergence level at which the incompressible projection stops iterating.
pub const ISE_DIVERGENCE_TARGET: f64 = 1e-10;
pub const ISE_MAX_PROJECTIONS: usize = 6;

/// Coefficients of `iħψ̇ = −(ħ²/2m)Δψ + Vψ + f(|ψ|²)ψ`.
#[derive(Clone, Debug)]
pub struct SchrodingerParams {
    pub potential: ScalarField,
    pub nonlinearity: Nonlinearity,
    pub hbar: f64,
    pub mass: f64,
}

impl SchrodingerParams {
    pub fn free(grid: &crate::Grid, hbar: f64) -> Self {
        Self {
            potential: grid.zeros(),
            nonlinearity: Nonlinearity::None,
            hbar,
            mass: 1.0,
        }
    }

    fn validate(&self, grid: &crate::Grid) -> Result<()> {
        grid.ensure_same(self.potential.grid())?;
        if !(self.hbar > 0.0 && self.mass > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "hbar {} and mass {} must be positive",
                self.hbar, self.mass
            )));
        }
        Ok(())
    }
}

fn potential_phase(psi: &ComplexField, p: &SchrodingerParams, dt: f64) -> ComplexField {
    let v = p.potential.values();
    let data = psi
        .values()
        .iter()
        .zip(v)
        .map(|(&c, &vi)| {
            let angle = -(vi + p.nonlinearity.eval(c.norm_sqr())) * dt / (2.0 * p.hbar);
            c * Complex64::from_polar(1.0, angle)
        })
        .collect();
    ComplexField::from_raw(psi.grid().clone(), data)
}

/// One Strang step: half potential phase, exact kinetic propagator, half
/// potential phase. Every factor is unitary.
pub fn step_schrodinger(
    psi: &WaveFunction,
    p: &SchrodingerParams,
    dt: f64,
) -> Result<WaveFunction> {
    p.validate(psi.grid())?;
    let half = potential_phase(psi, p, dt);
    let ksq = psi.grid().ksq();
    let c = p.hbar * dt / (2.0 * p.mass);
    let kinetic = half.apply_multiplier(|i| Complex64::from_polar(1.0, -c * ksq[i]));
    Ok(WaveFunction::from_unit(potential_phase(&kinetic, p, dt)))
}

/// `(ħ²/2m) ‖∇ψ‖² + ∫ (V|ψ|² + F(|ψ|²)) μ`.
pub fn schrodinger_hamiltonian(psi: &ComplexField, p: &SchrodingerParams) -> Result<f64> {
    p.validate(psi.grid())?;
    let kinetic: f64 = psi.gradient().iter().map(ComplexField::norm_sq).sum();
    let density = psi.abs_sq();
    let potential =
        density.inner(&p.potential) + density.map(|a| p.nonlinearity.primitive(a)).integrate();
    Ok(p.hbar * p.hbar / (2.0 * p.mass) * kinetic + potential)
}

/// Exact heat step `η̂ ↦ exp(−γ|k|²dt) η̂`. For negative `γ` the modes whose
/// gain would exceed [`MAX_HEAT_GAIN`] are removed.
pub fn step_heat(eta: &ScalarField, gamma: f64, dt: f64) -> ScalarField {
    let ksq = eta.grid().ksq();
    eta.apply_multiplier(|i| {
        let gain = (-gamma * ksq[i] * dt).exp();
        if gain > MAX_HEAT_GAIN {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(gain, 0.0)
        }
    })
}

/// A pair of wave functions `(ψ₁, ψ₂)` on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoComponentWave {
    first: ComplexField,
    second: ComplexField,
}

impl TwoComponentWave {
    pub fn new(first: ComplexField, second: ComplexField) -> Result<Self> {
        first.grid().ensure_same(second.grid())?;
        Ok(Self { first, second })
    }

    pub fn first(&self) -> &ComplexField {
        &self.first
    }

    pub fn second(&self) -> &ComplexField {
        &self.second
    }

    pub fn grid(&self) -> &crate::Grid {
        self.first.grid()
    }

    /// Pointwise `|ψ₁|² + |ψ₂|²`.
    pub fn density(&self) -> ScalarField {
        self.first.abs_sq() + self.second.abs_sq()
    }

    /// Divides both components by the pointwise modulus.
    pub fn normalized_pointwise(&self) -> Result<Self> {
        let norm = self.density().map(f64::sqrt);
        let min = norm.min();
        if min < crate::transforms::MIN_MODULUS {
            return Err(Error::VanishingAmplitude(min));
        }
        let inv = norm.map(|n| 1.0 / n);
        Ok(Self {
            first: self.first.mul_real(&inv),
            second: self.second.mul_real(&inv),
        })
    }

    fn map_both(&self, f: impl Fn(&ComplexField) -> ComplexField) -> Self {
        Self {
            first: f(&self.first),
            second: f(&self.second),
        }
    }
}

/// Momentum-map velocity `ħ Im(ψ̄₁∇ψ₁ + ψ̄₂∇ψ₂) / |Ψ|²`.
pub fn velocity_from_psi(psi: &TwoComponentWave, hbar: f64) -> Result<VectorField> {
    let density = psi.density();
    let min = density.min().sqrt();
    if min < crate::transforms::MIN_MODULUS {
        return Err(Error::VanishingAmplitude(min));
    }
    let g1 = psi.first.gradient();
    let g2 = psi.second.gradient();
    let comps = g1
        .iter()
        .zip(&g2)
        .map(|(d1, d2)| {
            let current = (&psi.first.conj() * d1) + (&psi.second.conj() * d2);
            current.im().zip_map(&density, |j, r| hbar * j / r)
        })
        .collect();
    VectorField::from_components(comps)
}

/// One step of the incompressible Schrödinger flow
/// `iħΨ̇ = −(ħ²/2)ΔΨ + pΨ` under the constraint `|Ψ| = 1`: an exact free
/// step, then a pressure phase `exp(−iq)` with `ħΔq = div v`, then pointwise
/// renormalization. The projection is repeated while the divergence left by
/// the pointwise products is above [`ISE_DIVERGENCE_TARGET`].
pub fn step_ise(psi: &TwoComponentWave, hbar: f64, dt: f64) -> Result<TwoComponentWave> {
    if hbar.is_nan() || hbar <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    let grid = psi.grid();
    if grid.dim() < 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: grid.dim(),
        });
    }
    let ksq = grid.ksq();
    let c = 0.5 * hbar * dt;
    let mut state =
        psi.map_both(|f| f.apply_multiplier(|i| Complex64::from_polar(1.0, -c * ksq[i])));
    for _ in 0..ISE_MAX_PROJECTIONS {
        state = state.normalized_pointwise()?;
        let div = velocity_from_psi(&state, hbar)?.divergence().zero_mean();
        if div.norm_l2() < ISE_DIVERGENCE_TARGET {
            break;
        }
        let q = div.inverse_laplacian()?.scale(1.0 / hbar);
        let phase = ComplexField::from_polar(&grid.constant(1.0), &-q)?;
        state = state.map_both(|f| f * &phase);
    }
    state.normalized_pointwise()
}
