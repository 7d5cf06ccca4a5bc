//! Casimir diagnostics of stored snapshots.

use std::io::Write;
use std::path::Path;

use geodens::casimirs::{
    cross_helicity, enstrophy_family, gen_cross_helicity, helicity, magnetic_helicity,
    CasimirWeight,
};
use geodens::snapshot::{FieldData, Snapshot};
use geodens::{ScalarField, VectorField};

use crate::error::Result;
use crate::scenario::format_float;

/// Every quantity that applies to the fields present in `snap`.
///
/// The 1-form is read from `alpha`, or from the velocity `v`; the density
/// from `rho` (uniform when absent); a magnetic field from `b`; 2D
/// vorticity from the 1-form or from `omega`.
pub fn quantities(snap: &Snapshot) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let grid = snap.grid();
    let rho = match snap.get("rho") {
        Some(FieldData::Scalar(r)) => {
            out.push(("mass".to_string(), r.integrate()));
            out.push(("min_rho".to_string(), r.min()));
            r.clone()
        }
        _ => grid.constant(1.0),
    };
    for name in ["psi", "psi1", "psi2"] {
        if let Some(FieldData::Complex(psi)) = snap.get(name) {
            out.push((format!("norm_{name}"), psi.norm_sq()));
        }
    }
    let alpha: Option<&VectorField> = ["alpha", "v"].iter().find_map(|n| match snap.get(n) {
        Some(FieldData::Vector(v)) => Some(v),
        _ => None,
    });
    let vorticity: Option<ScalarField> = match (alpha, snap.get("omega")) {
        (Some(a), _) if grid.dim() == 2 => Some(a.curl_2d()?),
        (_, Some(FieldData::Scalar(w))) if grid.dim() == 2 => Some(w.clone()),
        _ => None,
    };
    if let Some(w) = vorticity {
        for h in CasimirWeight::ALL {
            out.push((
                format!("enstrophy_{}", h.name()),
                enstrophy_family(&w, &rho, h)?,
            ));
        }
    }
    if grid.dim() == 3 {
        if let Some(a) = alpha {
            out.push(("helicity".to_string(), helicity(a)?));
        }
        if let Some(FieldData::Vector(b)) = snap.get("b") {
            out.push(("magnetic_helicity".to_string(), magnetic_helicity(b)?));
            if let Some(a) = alpha {
                out.push(("cross_helicity".to_string(), cross_helicity(a, b)?));
                out.push((
                    "gen_cross_helicity".to_string(),
                    gen_cross_helicity(a, &rho, b)?,
                ));
            }
        }
    }
    Ok(out)
}

/// Writes one long-format row per snapshot and quantity.
pub fn diagnose(paths: &[impl AsRef<Path>], sink: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["snapshot", "time", "quantity", "value"])?;
    for path in paths {
        let path = path.as_ref();
        let snap = Snapshot::read(path)?;
        let time = snap.time().map(format_float).unwrap_or_default();
        for (name, value) in quantities(&snap)? {
            writer.write_record([
                path.display().to_string(),
                time.clone(),
                name,
                format_float(value),
            ])?;
        }
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
