//! Maps between fluid variables `(ρ, θ)` and wave functions: the Madelung
//! transform with its differential and symplectic forms, the symmetrized
//! Hopf-Cole transform, and the two-component Madelung transform.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField};
use crate::quantum::TwoComponentWave;
use crate::spaces::{Density, ThetaWO, WaveFunction};

/// Smallest modulus accepted by [`madelung_inverse`].
pub const MIN_MODULUS: f64 = 1e-6;

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

/// `ψ = √ρ exp(iθ/ħ)` in the projective gauge.
pub fn madelung(rho: &Density, theta: &ScalarField, hbar: f64) -> Result<WaveFunction> {
    check_positive("hbar", hbar)?;
    rho.grid().ensure_same(theta.grid())?;
    let psi = ComplexField::from_polar(&rho.map(f64::sqrt), &theta.scale(1.0 / hbar))?;
    Ok(WaveFunction::from_unit(psi).gauged())
}

/// Recovers `(ρ, θ)` from a nonvanishing wave function; `θ` is returned in
/// the zero-mean gauge.
pub fn madelung_inverse(psi: &WaveFunction, hbar: f64) -> Result<(Density, ThetaWO)> {
    check_positive("hbar", hbar)?;
    let min = psi.min_abs();
    if min < MIN_MODULUS {
        return Err(Error::VanishingAmplitude(min));
    }
    let rho = Density::new(psi.abs_sq())?;
    let phase = unwrap_phase(psi)?;
    Ok((rho, ThetaWO::new(phase.scale(hbar))))
}

fn wrap(d: f64) -> f64 {
    let r = (d + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Continuous argument of a nonvanishing field, unwrapped from node 0 along
/// axis 0, then along axis 1 from each node of that line, then along axis 2.
///
/// Fails if the result is not single valued, i.e. if some step between
/// neighbouring nodes (periodically) exceeds π.
pub fn unwrap_phase(psi: &ComplexField) -> Result<ScalarField> {
    let grid = psi.grid();
    let dim = grid.dim();
    let shape = grid.shape();
    let raw: Vec<f64> = psi.values().iter().map(|c| c.arg()).collect();
    let mut strides = vec![1usize; dim];
    for a in (0..dim - 1).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }

    let mut unwrapped = vec![0.0; raw.len()];
    unwrapped[0] = raw[0];
    for i in 1..raw.len() {
        let axis = (0..dim)
            .rev()
            .find(|&a| grid.index(i, a) > 0)
            .expect("non-origin node has a nonzero index");
        let parent = i - strides[axis];
        unwrapped[i] = unwrapped[parent] + wrap(raw[i] - raw[parent]);
    }

    for (axis, &stride) in strides.iter().enumerate() {
        for i in 0..raw.len() {
            let j = grid.index(i, axis);
            let next = if j + 1 == shape[axis] {
                i + stride - shape[axis] * stride
            } else {
                i + stride
            };
            let mismatch = unwrapped[next] - unwrapped[i] - wrap(raw[next] - raw[i]);
            if mismatch.abs() > PI {
                return Err(Error::Winding {
                    axis,
                    winding: -(mismatch / (2.0 * PI)).round() as i64,
                });
            }
        }
    }
    ScalarField::new(grid.clone(), unwrapped)
}

/// Differential of the Madelung transform:
/// `ψ̇ = (ρ̇/(2ρ) + iθ̇/ħ) ψ` with `ψ = madelung(ρ, θ)`.
pub fn madelung_pushforward(
    rho: &Density,
    theta: &ScalarField,
    rho_dot: &ScalarField,
    theta_dot: &ScalarField,
    hbar: f64,
) -> Result<ComplexField> {
    rho.grid().ensure_same(rho_dot.grid())?;
    rho.grid().ensure_same(theta_dot.grid())?;
    let psi = madelung(rho, theta, hbar)?;
    let rate = ComplexField::from_parts(
        &rho_dot.zip_map(rho, |a, r| a / (2.0 * r)),
        &theta_dot.scale(1.0 / hbar),
    )?;
    Ok(&rate * psi.field())
}

/// Canonical form on `(ρ, θ)` tangents: `∫ (θ̇₁ρ̇₂ − θ̇₂ρ̇₁) μ`.
pub fn canonical_symplectic(
    first: (&ScalarField, &ScalarField),
    second: (&ScalarField, &ScalarField),
) -> Result<f64> {
    let (rho1, theta1) = first;
    let (rho2, theta2) = second;
    for f in [theta1, rho2, theta2] {
        rho1.grid().ensure_same(f.grid())?;
    }
    Ok(theta1.inner(rho2) - theta2.inner(rho1))
}

/// Symplectic form on wave-function tangents: `2ħ ∫ Im(ψ̇₁ conj(ψ̇₂)) μ`.
pub fn projective_symplectic(
    first: &ComplexField,
    second: &ComplexField,
    hbar: f64,
) -> Result<f64> {
    first.grid().ensure_same(second.grid())?;
    Ok(2.0 * hbar * first.inner(second).im)
}

/// `η± = √ρ exp(±θ/(2γ))`.
pub fn hopf_cole(
    rho: &ScalarField,
    theta: &ScalarField,
    gamma: f64,
) -> Result<(ScalarField, ScalarField)> {
    check_positive("gamma", gamma)?;
    rho.grid().ensure_same(theta.grid())?;
    let min = rho.min();
    if min <= 0.0 {
        return Err(Error::Positivity { min });
    }
    let plus = rho.zip_map(theta, |r, t| r.sqrt() * (t / (2.0 * gamma)).exp());
    let minus = rho.zip_map(theta, |r, t| r.sqrt() * (-t / (2.0 * gamma)).exp());
    Ok((plus, minus))
}

/// `ρ = η⁺η⁻`, `θ = γ ln(η⁺/η⁻)`.
pub fn hopf_cole_inverse(
    plus: &ScalarField,
    minus: &ScalarField,
    gamma: f64,
) -> Result<(ScalarField, ScalarField)> {
    check_positive("gamma", gamma)?;
    plus.grid().ensure_same(minus.grid())?;
    let min = plus.min().min(minus.min());
    if min <= 0.0 {
        return Err(Error::Positivity { min });
    }
    Ok((
        plus * minus,
        plus.zip_map(minus, |p, m| gamma * (p / m).ln()),
    ))
}

/// `Ψ = (√ρ₁ exp(iθ₁/ħ), √ρ₂ exp(iθ₂/ħ))`.
pub fn two_component_madelung(
    first: (&ScalarField, &ScalarField),
    second: (&ScalarField, &ScalarField),
    hbar: f64,
) -> Result<TwoComponentWave> {
    check_positive("hbar", hbar)?;
    let component = |rho: &ScalarField, theta: &ScalarField| -> Result<ComplexField> {
        let min = rho.min();
        if min < 0.0 {
            return Err(Error::Positivity { min });
        }
        ComplexField::from_polar(&rho.map(f64::sqrt), &theta.scale(1.0 / hbar))
    };
    TwoComponentWave::new(component(first.0, first.1)?, component(second.0, second.1)?)
}
