//! Named analytic initial data.

use geodens::dynamics_wo::Vorticity2D;
use geodens::{Density, Grid, ScalarField, VectorField};

use crate::config::InitialCondition;
use crate::error::Result;

/// Initial data in the form a profile naturally provides: a density with a
/// potential, or a density with a velocity field.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub rho: Density,
    pub theta: ScalarField,
    /// Set by profiles that are not gradient flows.
    pub velocity: Option<VectorField>,
}

impl InitialData {
    /// The velocity field, `∇θ` unless the profile supplied one.
    pub fn velocity(&self) -> VectorField {
        self.velocity
            .clone()
            .unwrap_or_else(|| self.theta.gradient())
    }
}

pub fn build(grid: &Grid, profile: &InitialCondition) -> Result<InitialData> {
    let axis0 = |k: u32| move |x: &[f64]| k as f64 * x[0];
    let data = match *profile {
        InitialCondition::Uniform => InitialData {
            rho: Density::uniform(grid),
            theta: grid.zeros(),
            velocity: None,
        },
        InitialCondition::CosineBump {
            epsilon,
            k,
            density_epsilon,
            density_axis,
        } => {
            let phase = axis0(k);
            let bump = |x: &[f64]| 1.0 + density_epsilon * (k as f64 * x[density_axis]).cos();
            InitialData {
                rho: Density::normalized(grid.from_fn(bump))?,
                theta: grid.from_fn(|x| epsilon * phase(x).cos()),
                velocity: None,
            }
        }
        InitialCondition::Wkb { epsilon, k, .. } => {
            let phase = axis0(k);
            InitialData {
                rho: Density::normalized(grid.from_fn(|x| 1.0 + epsilon * phase(x).cos()))?,
                theta: grid.from_fn(|x| epsilon * phase(x).sin()),
                velocity: None,
            }
        }
        InitialCondition::Abc { a, b, c } => InitialData {
            rho: Density::uniform(grid),
            theta: grid.zeros(),
            velocity: Some(abc(grid, a, b, c)?),
        },
        InitialCondition::TaylorGreen { amplitude } => InitialData {
            rho: Density::uniform(grid),
            theta: grid.zeros(),
            velocity: Some(Vorticity2D::new(taylor_green(grid, amplitude))?.velocity()),
        },
    };
    Ok(data)
}

/// `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`.
pub fn abc(grid: &Grid, a: f64, b: f64, c: f64) -> Result<VectorField> {
    Ok(VectorField::from_components(vec![
        grid.from_fn(|x| a * x[2].sin() + c * x[1].cos()),
        grid.from_fn(|x| b * x[0].sin() + a * x[2].cos()),
        grid.from_fn(|x| c * x[1].sin() + b * x[0].cos()),
    ])?)
}

pub fn taylor_green(grid: &Grid, amplitude: f64) -> ScalarField {
    grid.from_fn(|x| amplitude * x[0].cos() * x[1].cos())
}
