//! Conversion of snapshots between fluid and wave-function variables.

use std::path::Path;

use clap::ValueEnum;
use geodens::snapshot::{FieldData, Snapshot};
use geodens::transforms::{madelung, madelung_inverse};
use geodens::{Density, WaveFunction};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Representation {
    /// `ψ = √ρ exp(iθ/ħ)`, stored as `psi`.
    Psi,
    /// `ρ` and zero-mean `θ`, stored as `rho` and `theta`.
    RhoTheta,
}

/// Converts the fields of `input` to `to`. Fields not involved in the
/// conversion are copied unchanged.
pub fn convert(input: &Snapshot, to: Representation, hbar: f64) -> Result<Snapshot> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(CliError::config(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    let consumed: &[&str] = match to {
        Representation::Psi => &["rho", "theta"],
        Representation::RhoTheta => &["psi"],
    };
    let mut out = Snapshot::new(input.grid().clone());
    if let Some(t) = input.time() {
        out = out.with_time(t);
    }
    for (name, data) in input.fields() {
        if !consumed.contains(&name.as_str()) {
            out.push(name.clone(), data.clone())?;
        }
    }
    match to {
        Representation::Psi => {
            let rho = Density::new(input.scalar("rho")?.clone())?;
            let psi = madelung(&rho, input.scalar("theta")?, hbar)?;
            out.push("psi", FieldData::Complex(psi.into_field()))?;
        }
        Representation::RhoTheta => {
            let psi = WaveFunction::new(input.complex("psi")?.clone())?;
            let (rho, theta) = madelung_inverse(&psi, hbar)?;
            out.push("rho", FieldData::Scalar(rho.into_field()))?;
            out.push("theta", FieldData::Scalar(theta.into_field()))?;
        }
    }
    Ok(out)
}

pub fn transform(input: &Path, output: &Path, to: Representation, hbar: f64) -> Result<()> {
    let snap = Snapshot::read(input)?;
    convert(&snap, to, hbar)?.write(output)?;
    Ok(())
}
