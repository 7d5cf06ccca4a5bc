//! Potential functionals on densities: values and variational derivatives,
//! and the thermodynamic work and pressure of barotropic state functions.

use std::f64::consts::PI;

use crate::error::Result;
use crate::field::ScalarField;
use crate::spaces::Density;

/// Internal energy per unit mass `e(ρ)` of a barotropic fluid.
#[derive(Clone, Debug, PartialEq)]
pub enum StateFunction {
    /// `e = ρ/2`: shallow water, `W = ρ`, `P = ρ²/2`.
    Shallow,
    /// `e = ρ^(a−1)`, so `P = (a−1) ρ^a`.
    Polytropic { exponent: f64 },
    /// `e = c`; no pressure.
    Constant { value: f64 },
}

impl StateFunction {
    pub fn energy(&self, rho: f64) -> f64 {
        match *self {
            StateFunction::Shallow => 0.5 * rho,
            StateFunction::Polytropic { exponent } => rho.powf(exponent - 1.0),
            StateFunction::Constant { value } => value,
        }
    }

    /// `de/dρ`.
    pub fn slope(&self, rho: f64) -> f64 {
        match *self {
            StateFunction::Shallow => 0.5,
            StateFunction::Polytropic { exponent } => (exponent - 1.0) * rho.powf(exponent - 2.0),
            StateFunction::Constant { .. } => 0.0,
        }
    }

    /// `d²e/dρ²`.
    pub fn curvature(&self, rho: f64) -> f64 {
        match *self {
            StateFunction::Polytropic { exponent } => {
                (exponent - 1.0) * (exponent - 2.0) * rho.powf(exponent - 3.0)
            }
            _ => 0.0,
        }
    }

    /// Squared sound speed `dP/dρ = ρ dW/dρ`.
    pub fn sound_speed_sq(&self, rho: f64) -> f64 {
        rho * (self.curvature(rho) * rho + 2.0 * self.slope(rho))
    }
}

/// `W = e′ρ + e`.
pub fn work_function(e: &StateFunction, rho: &ScalarField) -> ScalarField {
    rho.map(|r| e.slope(r) * r + e.energy(r))
}

/// `P = e′ρ²`.
pub fn pressure(e: &StateFunction, rho: &ScalarField) -> ScalarField {
    rho.map(|r| e.slope(r) * r * r)
}

/// Pointwise nonlinearity `f(|ψ|²)` of a Schrödinger equation together with
/// its primitive `F`, `F(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Nonlinearity {
    None,
    /// `f(a) = κ a`.
    Cubic {
        kappa: f64,
    },
    /// `f(a) = (a − 1)² / 2`.
    Saturating,
}

impl Nonlinearity {
    pub fn eval(&self, a: f64) -> f64 {
        match *self {
            Nonlinearity::None => 0.0,
            Nonlinearity::Cubic { kappa } => kappa * a,
            Nonlinearity::Saturating => 0.5 * (a - 1.0) * (a - 1.0),
        }
    }

    pub fn primitive(&self, a: f64) -> f64 {
        match *self {
            Nonlinearity::None => 0.0,
            Nonlinearity::Cubic { kappa } => 0.5 * kappa * a * a,
            Nonlinearity::Saturating => ((a - 1.0).powi(3) + 1.0) / 6.0,
        }
    }
}

/// A potential functional `U(ρ)`.
///
/// Variational derivatives are defined modulo constants and always returned
/// with zero mean.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Zero,
    /// `∫ V ρ μ`.
    Linear(ScalarField),
    /// `½ ∫ ρ² μ`.
    Quadratic,
    /// `∫ e(ρ) ρ μ`.
    Barotropic(StateFunction),
    /// `2πG ∫ ρ Δ⁻¹(ρ − ρ̄) μ`.
    Gravity {
        constant: f64,
    },
    /// `scale · ½ ∫ |∇ρ|²/ρ μ`. A negative scale gives the sign-reversed
    /// quantum pressure of the heat-flow system.
    FisherInfo {
        scale: f64,
    },
    /// `∫ ρ ln ρ μ`.
    Entropy,
    /// `∫ F(ρ) μ` for a Schrödinger nonlinearity `f = F′`.
    Pointwise(Nonlinearity),
    Sum(Vec<Potential>),
}

impl Potential {
    /// Quantum pressure `(ħ²/4)` times the Fisher information.
    pub fn quantum_pressure(hbar: f64) -> Self {
        Potential::FisherInfo {
            scale: 0.25 * hbar * hbar,
        }
    }

    pub fn value(&self, rho: &Density) -> Result<f64> {
        self.value_of(rho.field())
    }

    pub fn vder(&self, rho: &Density) -> Result<ScalarField> {
        self.vder_of(rho.field())
    }

    pub(crate) fn value_of(&self, rho: &ScalarField) -> Result<f64> {
        Ok(match self {
            Potential::Zero => 0.0,
            Potential::Linear(v) => {
                v.grid().ensure_same(rho.grid())?;
                v.inner(rho)
            }
            Potential::Quadratic => 0.5 * rho.inner(rho),
            Potential::Barotropic(e) => rho.map(|r| e.energy(r) * r).integrate(),
            Potential::Gravity { constant } => {
                let phi = rho.zero_mean().inverse_laplacian()?;
                2.0 * PI * constant * rho.inner(&phi)
            }
            Potential::FisherInfo { scale } => {
                2.0 * scale * rho.map(f64::sqrt).gradient().norm_sq().integrate()
            }
            Potential::Entropy => rho.map(|r| r * r.ln()).integrate(),
            Potential::Pointwise(f) => rho.map(|r| f.primitive(r)).integrate(),
            Potential::Sum(parts) => {
                let mut total = 0.0;
                for p in parts {
                    total += p.value_of(rho)?;
                }
                total
            }
        })
    }

    pub(crate) fn vder_of(&self, rho: &ScalarField) -> Result<ScalarField> {
        let raw = match self {
            Potential::Zero => rho.grid().zeros(),
            Potential::Linear(v) => {
                v.grid().ensure_same(rho.grid())?;
                v.clone()
            }
            Potential::Quadratic => rho.clone(),
            Potential::Barotropic(e) => work_function(e, rho),
            Potential::Gravity { constant } => rho
                .zero_mean()
                .inverse_laplacian()?
                .scale(4.0 * PI * constant),
            Potential::FisherInfo { scale } => {
                let root = rho.map(f64::sqrt);
                root.laplacian().zip_map(&root, |l, s| -2.0 * scale * l / s)
            }
            Potential::Entropy => rho.map(f64::ln),
            Potential::Pointwise(f) => rho.map(|r| f.eval(r)),
            Potential::Sum(parts) => {
                let mut total = rho.grid().zeros();
                for p in parts {
                    total = total + p.vder_of(rho)?;
                }
                total
            }
        };
        Ok(raw.zero_mean())
    }
}
