//! Classical Runge-Kutta stepping over tuples of fields, and the spectral
//! tail guard shared by the pseudo-spectral solvers.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Largest admissible fraction of fluctuation energy in the top third of the
/// retained spectrum.
pub const TAIL_LIMIT: f64 = 1e-4;

fn combine(base: &[ScalarField], slope: &[ScalarField], h: f64) -> Vec<ScalarField> {
    base.iter().zip(slope).map(|(b, k)| b.axpy(h, k)).collect()
}

/// One RK4 step of `ẏ = rhs(y)` where `y` is a tuple of fields.
pub fn rk4<F>(state: &[ScalarField], dt: f64, mut rhs: F) -> Result<Vec<ScalarField>>
where
    F: FnMut(&[ScalarField]) -> Result<Vec<ScalarField>>,
{
    let k1 = rhs(state)?;
    let k2 = rhs(&combine(state, &k1, 0.5 * dt))?;
    let k3 = rhs(&combine(state, &k2, 0.5 * dt))?;
    let k4 = rhs(&combine(state, &k3, dt))?;
    Ok(state
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let incr = (&k1[i] + &k4[i]).axpy(2.0, &(&k2[i] + &k3[i]));
            y.axpy(dt / 6.0, &incr)
        })
        .collect())
}

/// Largest tail fraction among `fields`.
pub fn tail_fraction(fields: &[&ScalarField]) -> f64 {
    fields.iter().map(|f| f.tail_fraction()).fold(0.0, f64::max)
}

/// Fails with [`Error::SpectralBlowup`] when any field has resolved too little
/// of its spectrum.
pub fn check_tail(fields: &[&ScalarField]) -> Result<()> {
    let fraction = tail_fraction(fields);
    if fraction > TAIL_LIMIT {
        Err(Error::SpectralBlowup {
            fraction,
            limit: TAIL_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Advective time-step bound `0.5 h / speed`.
pub fn cfl_bound(min_spacing: f64, speed: f64) -> f64 {
    if speed > 0.0 {
        0.5 * min_spacing / speed
    } else {
        f64::INFINITY
    }
}
