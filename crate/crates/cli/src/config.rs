//! Scenario configuration files.
//!
//! A scenario is a TOML document with an explicit schema version. Unknown
//! keys are rejected so that a misspelled tolerance or parameter never falls
//! back to a default silently.

use std::path::Path;

use geodens::{Grid, Nonlinearity, Potential, StateFunction};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    NewtonWo,
    Eulerian,
    FullCompressible,
    Relativistic,
    Euler2d,
    NewtonFr,
    Neumann,
    Schrodinger,
    Ise,
    Heat,
    HjViscous,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub shape: Vec<usize>,
    /// Period lengths; 2π on every axis when omitted.
    pub lengths: Option<Vec<f64>>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        if self.shape.is_empty() {
            return Err(CliError::config("grid.shape is empty"));
        }
        let grid = match &self.lengths {
            Some(l) => Grid::new(&self.shape, l),
            None => Grid::periodic(&self.shape),
        };
        grid.map_err(|e| CliError::config(e.to_string()))
    }
}

/// Named analytic initial data. Profiles act on the first coordinate unless
/// stated otherwise.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `ρ = 1`, `θ = 0`.
    Uniform,
    /// `θ = ε cos kx`, `ρ ∝ 1 + δ cos(k x_a)` with `a = density_axis`.
    CosineBump {
        epsilon: f64,
        #[serde(default = "unit_mode")]
        k: u32,
        #[serde(default)]
        density_epsilon: f64,
        #[serde(default)]
        density_axis: usize,
    },
    /// `ρ ∝ 1 + ε cos kx`, `θ = ε sin kx`, `ψ = √ρ exp(iθ/ħ)`.
    Wkb {
        epsilon: f64,
        #[serde(default = "unit_mode")]
        k: u32,
        hbar: Option<f64>,
    },
    /// Arnold-Beltrami-Childress field on a 3D grid.
    Abc { a: f64, b: f64, c: f64 },
    /// `ω = A cos x cos y` on a 2D grid.
    TaylorGreen {
        #[serde(default = "unit_amplitude")]
        amplitude: f64,
    },
}

fn unit_mode() -> u32 {
    1
}

fn unit_amplitude() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Shallow,
    Polytropic { exponent: f64 },
    Constant { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntropicSpec {
    Shallow,
    Polytropic { exponent: f64 },
    IdealGas { exponent: f64 },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    Cubic { kappa: f64 },
    Saturating,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Zero,
    /// `∫ V ρ` with `V = A cos kx`.
    Linear {
        amplitude: f64,
        #[serde(default = "unit_mode")]
        k: u32,
    },
    Quadratic,
    Barotropic {
        state: StateSpec,
    },
    Gravity {
        constant: f64,
    },
    Fisher {
        scale: f64,
    },
    QuantumPressure {
        hbar: f64,
    },
    Entropy,
    Pointwise {
        nonlinearity: NonlinearitySpec,
    },
    Sum {
        terms: Vec<PotentialSpec>,
    },
}

impl PotentialSpec {
    pub fn build(&self, grid: &Grid) -> Potential {
        match self {
            Self::Zero => Potential::Zero,
            Self::Linear { amplitude, k } => Potential::Linear(cosine(grid, *amplitude, *k)),
            Self::Quadratic => Potential::Quadratic,
            Self::Barotropic { state } => Potential::Barotropic(match *state {
                StateSpec::Shallow => StateFunction::Shallow,
                StateSpec::Polytropic { exponent } => StateFunction::Polytropic { exponent },
                StateSpec::Constant { value } => StateFunction::Constant { value },
            }),
            Self::Gravity { constant } => Potential::Gravity {
                constant: *constant,
            },
            Self::Fisher { scale } => Potential::FisherInfo { scale: *scale },
            Self::QuantumPressure { hbar } => Potential::quantum_pressure(*hbar),
            Self::Entropy => Potential::Entropy,
            Self::Pointwise { nonlinearity } => Potential::Pointwise(nonlinearity.build()),
            Self::Sum { terms } => Potential::Sum(terms.iter().map(|t| t.build(grid)).collect()),
        }
    }

    /// Splits the descriptor into an external potential and a pointwise
    /// nonlinearity, the only terms a Schrödinger equation accepts.
    pub fn schrodinger_terms(&self, grid: &Grid) -> Result<(geodens::ScalarField, Nonlinearity)> {
        let mut external = grid.zeros();
        let mut nonlinearity = Nonlinearity::None;
        let mut visit = vec![self];
        while let Some(p) = visit.pop() {
            match p {
                Self::Zero => {}
                Self::Linear { amplitude, k } => external = &external + &cosine(grid, *amplitude, *k),
                Self::Pointwise { nonlinearity: n } if nonlinearity == Nonlinearity::None => {
                    nonlinearity = n.build();
                }
                Self::Sum { terms } => visit.extend(terms),
                other => {
                    return Err(CliError::config(format!(
                        "potential {other:?} has no Schrödinger counterpart; use linear and one pointwise term"
                    )))
                }
            }
        }
        Ok((external, nonlinearity))
    }
}

impl NonlinearitySpec {
    fn build(&self) -> Nonlinearity {
        match *self {
            Self::Cubic { kappa } => Nonlinearity::Cubic { kappa },
            Self::Saturating => Nonlinearity::Saturating,
        }
    }
}

pub fn cosine(grid: &Grid, amplitude: f64, k: u32) -> geodens::ScalarField {
    grid.from_fn(|x| amplitude * (k as f64 * x[0]).cos())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub system: SystemKind,
    pub grid: GridSpec,
    pub initial: InitialCondition,
    #[serde(default)]
    pub potential: PotentialSpec,
    /// Equation of state of the fully compressible system.
    pub entropic_state: Option<EntropicSpec>,
    /// Initial entropy density as a multiple of the density.
    #[serde(default)]
    pub entropy_ratio: f64,
    pub hbar: Option<f64>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
    pub mass: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between diagnostics rows.
    #[serde(default = "every_step")]
    pub diagnostics_every: usize,
    /// Steps between snapshots; 0 writes only the first and last state.
    #[serde(default)]
    pub snapshot_every: usize,
    /// Diagnostics columns; all that apply to the system when omitted.
    pub diagnostics: Option<Vec<String>>,
}

fn every_step() -> usize {
    1
}

/// `line L, column C: message` for a parse error.
fn one_line(text: &str, e: &toml::de::Error) -> String {
    let message = e.message().trim().replace('\n', "; ");
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            format!("line {line}, column {column}: {message}")
        }
        None => message,
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self =
            toml::from_str(text).map_err(|e| CliError::config(one_line(text, &e)))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(CliError::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(CliError::config(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.diagnostics_every == 0 {
            return Err(CliError::config("diagnostics_every must be at least 1"));
        }
        let grid = self.grid.build()?;
        let dim = grid.dim();
        let need_dim = |d: usize| -> Result<()> {
            if dim == d {
                Ok(())
            } else {
                Err(CliError::config(format!(
                    "system {:?} needs a {d}D grid, got {dim}D",
                    self.system
                )))
            }
        };
        match self.system {
            SystemKind::FullCompressible | SystemKind::Relativistic => need_dim(1)?,
            SystemKind::Euler2d => need_dim(2)?,
            SystemKind::Ise if dim < 2 => {
                return Err(CliError::config("system ise needs a 2D or 3D grid"))
            }
            _ => {}
        }
        match &self.initial {
            InitialCondition::Abc { .. } if dim != 3 => {
                return Err(CliError::config("profile abc needs a 3D grid"))
            }
            InitialCondition::TaylorGreen { .. } if dim != 2 => {
                return Err(CliError::config("profile taylor-green needs a 2D grid"))
            }
            InitialCondition::CosineBump { density_axis, .. } if *density_axis >= dim => {
                return Err(CliError::config(format!(
                    "density_axis {density_axis} is out of range for a {dim}D grid"
                )))
            }
            _ => {}
        }
        let positive = |name: &str, v: Option<f64>| -> Result<f64> {
            match v {
                Some(x) if x.is_finite() && x > 0.0 => Ok(x),
                Some(x) => Err(CliError::config(format!(
                    "{name} must be positive, got {x}"
                ))),
                None => Err(CliError::config(format!(
                    "system {:?} needs {name}",
                    self.system
                ))),
            }
        };
        match self.system {
            SystemKind::Schrodinger | SystemKind::Ise => {
                positive("hbar", self.hbar)?;
            }
            SystemKind::Relativistic => {
                positive("c", self.c)?;
            }
            SystemKind::HjViscous => {
                self.gamma
                    .filter(|g| g.is_finite() && *g != 0.0)
                    .ok_or_else(|| CliError::config("system HjViscous needs a nonzero gamma"))?;
            }
            SystemKind::FullCompressible if self.entropic_state.is_none() => {
                return Err(CliError::config(
                    "system FullCompressible needs entropic_state",
                ));
            }
            _ => {}
        }
        if let Some(m) = self.mass {
            positive("mass", Some(m))?;
        }
        if self.system == SystemKind::Schrodinger {
            self.potential.schrodinger_terms(&grid)?;
        }
        Ok(())
    }
}
