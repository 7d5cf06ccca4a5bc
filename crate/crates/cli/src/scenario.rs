//! Scenario runs: state construction, stepping, diagnostics and output.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use geodens::dynamics_fr::{step_neumann, step_newton_fr, FRState, NeumannState};
use geodens::dynamics_wo::{
    heat_flow_entropy, step_euler2d, step_eulerian, step_full_compressible, step_hj_viscous,
    step_newton_wo, step_relativistic, EntropicStateFunction, EulerianState, FullState, RelState,
    Vorticity2D, WOState,
};
use geodens::integrate::{cfl_bound, tail_fraction};
use geodens::quantum::{
    schrodinger_hamiltonian, step_ise, step_schrodinger, velocity_from_psi, SchrodingerParams,
    TwoComponentWave,
};
use geodens::snapshot::{FieldData, Snapshot};
use geodens::spaces::sqrt_map;
use geodens::transforms::{madelung, two_component_madelung};
use geodens::{Density, Grid, Potential, ScalarField, ThetaFR, ThetaWO, WaveFunction};

use crate::catalog::{self, InitialData};
use crate::config::{EntropicSpec, InitialCondition, PotentialSpec, ScenarioConfig, SystemKind};
use crate::error::{CliError, Result};

/// Diagnostics each system can report, in the default column order.
pub fn available_diagnostics(system: SystemKind) -> &'static [&'static str] {
    use SystemKind::*;
    match system {
        NewtonWo => &["hamiltonian", "mass", "max_speed", "min_rho", "tail"],
        Eulerian => &["energy", "mass", "curl_norm", "min_rho", "tail"],
        FullCompressible => &["energy", "mass", "entropy", "min_rho", "tail"],
        Relativistic => &["hamiltonian", "mass", "momentum", "min_rho", "tail"],
        Euler2d => &["energy", "enstrophy", "casimir_s3", "max_vorticity", "tail"],
        NewtonFr => &[
            "hamiltonian",
            "mass",
            "gauge",
            "speed",
            "multiplier",
            "min_rho",
        ],
        Neumann => &["energy", "norm", "multiplier", "lagrangian"],
        Schrodinger => &["hamiltonian", "norm", "min_rho"],
        Ise => &["modulus_error", "divergence", "energy"],
        Heat => &["entropy", "mass", "min_rho"],
        HjViscous => &["theta_max", "theta_l2"],
    }
}

#[derive(Clone, Debug)]
enum State {
    NewtonWo(WOState),
    Eulerian(EulerianState),
    FullCompressible(FullState),
    Relativistic(RelState),
    Euler2d(Vorticity2D),
    NewtonFr(FRState),
    Neumann(NeumannState),
    Schrodinger(WaveFunction),
    Ise(TwoComponentWave),
    Heat(Density),
    HjViscous(ThetaWO),
}

/// A configured system and its current state.
#[derive(Clone, Debug)]
pub struct Simulation {
    grid: Grid,
    state: State,
    potential: Potential,
    entropic: EntropicStateFunction,
    schrodinger: Option<SchrodingerParams>,
    hbar: f64,
    gamma: f64,
    c: f64,
    columns: Vec<String>,
}

impl Simulation {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let grid = config.grid.build()?;
        let system = config.system;
        let columns = match &config.diagnostics {
            None => available_diagnostics(system)
                .iter()
                .map(|s| s.to_string())
                .collect(),
            Some(list) => {
                let known = available_diagnostics(system);
                if let Some(bad) = list.iter().find(|d| !known.contains(&d.as_str())) {
                    return Err(CliError::config(format!(
                        "diagnostic {bad:?} is not available for {system:?}; choose from {known:?}"
                    )));
                }
                list.clone()
            }
        };
        let hbar = effective_hbar(config)?;
        let data = catalog::build(&grid, &config.initial)?;
        let needs_potential = !matches!(system, SystemKind::Eulerian | SystemKind::Euler2d);
        if needs_potential && data.velocity.is_some() {
            return Err(CliError::config(format!(
                "profile {:?} defines a velocity field, but {system:?} starts from a density and a potential",
                config.initial
            )));
        }
        let potential = config.potential.build(&grid);
        let entropic = match config.entropic_state {
            None | Some(EntropicSpec::Shallow) => EntropicStateFunction::Shallow,
            Some(EntropicSpec::Polytropic { exponent }) => {
                EntropicStateFunction::Polytropic { exponent }
            }
            Some(EntropicSpec::IdealGas { exponent }) => {
                EntropicStateFunction::IdealGas { exponent }
            }
        };
        let schrodinger = if system == SystemKind::Schrodinger {
            let (external, nonlinearity) = config.potential.schrodinger_terms(&grid)?;
            Some(SchrodingerParams {
                potential: external,
                nonlinearity,
                hbar,
                mass: config.mass.unwrap_or(1.0),
            })
        } else {
            None
        };
        if system != SystemKind::Schrodinger && config.potential != PotentialSpec::Zero {
            let uses = matches!(
                system,
                SystemKind::NewtonWo | SystemKind::Eulerian | SystemKind::NewtonFr
            );
            if !uses {
                return Err(CliError::config(format!(
                    "{system:?} does not take a potential"
                )));
            }
        }
        let state = initial_state(config, &data, hbar)?;
        Ok(Self {
            grid,
            state,
            potential,
            entropic,
            schrodinger,
            hbar,
            gamma: config.gamma.unwrap_or(0.0),
            c: config.c.unwrap_or(0.0),
            columns,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let next = match &self.state {
            State::NewtonWo(s) => State::NewtonWo(step_newton_wo(s, &self.potential, dt)?),
            State::Eulerian(s) => State::Eulerian(step_eulerian(s, &self.potential, dt)?),
            State::FullCompressible(s) => {
                State::FullCompressible(step_full_compressible(s, &self.entropic, dt)?)
            }
            State::Relativistic(s) => State::Relativistic(step_relativistic(s, self.c, dt)?),
            State::Euler2d(w) => State::Euler2d(step_euler2d(w, dt)?),
            State::NewtonFr(s) => State::NewtonFr(step_newton_fr(s, &self.potential, dt)?),
            State::Neumann(s) => State::Neumann(step_neumann(s, dt)?),
            State::Schrodinger(psi) => {
                let p = self.schrodinger.as_ref().expect("schrodinger parameters");
                State::Schrodinger(step_schrodinger(psi, p, dt)?)
            }
            State::Ise(psi) => State::Ise(step_ise(psi, self.hbar, dt)?),
            State::Heat(rho) => State::Heat(heat_flow_entropy(rho, dt)?),
            State::HjViscous(theta) => State::HjViscous(step_hj_viscous(theta, self.gamma, dt)),
        };
        self.state = next;
        Ok(())
    }

    /// Advective speed used by the CFL bound, if the system has one.
    pub fn signal_speed(&self) -> Option<f64> {
        let sound = |rho: &ScalarField| match &self.potential {
            Potential::Barotropic(e) => rho.map(|r| e.sound_speed_sq(r).max(0.0)).max().sqrt(),
            _ => 0.0,
        };
        let peak = |v: &geodens::VectorField| v.norm_sq().max().sqrt();
        match &self.state {
            State::NewtonWo(s) => Some(s.max_speed() + sound(&s.rho)),
            State::Eulerian(s) => Some(peak(&s.v) + sound(&s.rho)),
            State::FullCompressible(s) => {
                let c2 = s
                    .rho
                    .zip_map(&s.sigma, |r, sg| {
                        let h = 1e-6 * r;
                        (self.entropic.pressure(r + h, sg) - self.entropic.pressure(r - h, sg))
                            / (2.0 * h)
                    })
                    .max();
                Some(s.v.max_abs() + c2.max(0.0).sqrt())
            }
            State::Relativistic(_) => Some(self.c),
            State::Euler2d(w) => Some(peak(&w.velocity())),
            _ => None,
        }
    }

    pub fn diagnostics(&self) -> Result<Vec<f64>> {
        self.columns.iter().map(|c| self.diagnostic(c)).collect()
    }

    fn diagnostic(&self, name: &str) -> Result<f64> {
        let value = match (&self.state, name) {
            (State::NewtonWo(s), "hamiltonian") => s.hamiltonian(&self.potential)?,
            (State::NewtonWo(s), "max_speed") => s.max_speed(),
            (State::NewtonWo(s), "tail") => tail_fraction(&[&s.rho, &s.theta]),
            (State::Eulerian(s), "energy") => s.energy(&self.potential)?,
            (State::Eulerian(s), "curl_norm") => s.curl_norm()?,
            (State::Eulerian(s), "tail") => {
                let mut fields = vec![s.rho.field()];
                fields.extend(s.v.components());
                tail_fraction(&fields)
            }
            (State::FullCompressible(s), "energy") => s.energy(&self.entropic),
            (State::FullCompressible(s), "entropy") => s.sigma.integrate(),
            (State::FullCompressible(s), "tail") => tail_fraction(&[&s.v, &s.rho, &s.sigma]),
            (State::Relativistic(s), "hamiltonian") => s.hamiltonian(self.c),
            (State::Relativistic(s), "momentum") => s.m.integrate(),
            (State::Relativistic(s), "tail") => tail_fraction(&[&s.m, &s.rho]),
            (State::Euler2d(w), "energy") => w.energy(),
            (State::Euler2d(w), "enstrophy") => w.field().map(|x| x * x).integrate(),
            (State::Euler2d(w), "casimir_s3") => w.field().map(|x| x * x * x).integrate(),
            (State::Euler2d(w), "max_vorticity") => w.field().max_abs(),
            (State::Euler2d(w), "tail") => tail_fraction(&[w.field()]),
            (State::NewtonFr(s), "hamiltonian") => s.hamiltonian(&self.potential)?,
            (State::NewtonFr(s), "gauge") => s.theta.gauge_residual(&s.rho),
            (State::NewtonFr(s), "speed") => s.speed(),
            (State::NewtonFr(s), "multiplier") => s.multiplier(&self.potential)?,
            (State::Neumann(s), "energy") => s.energy(),
            (State::Neumann(s), "norm") => s.f.inner(&s.f),
            (State::Neumann(s), "multiplier") => s.multiplier(),
            (State::Neumann(s), "lagrangian") => s.lagrangian(),
            (State::Schrodinger(psi), "hamiltonian") => {
                let p = self.schrodinger.as_ref().expect("schrodinger parameters");
                schrodinger_hamiltonian(psi, p)?
            }
            (State::Schrodinger(psi), "norm") => psi.norm_sq(),
            (State::Schrodinger(psi), "min_rho") => psi.abs_sq().min(),
            (State::Ise(psi), "modulus_error") => psi.density().shift(-1.0).max_abs(),
            (State::Ise(psi), "divergence") => {
                velocity_from_psi(psi, self.hbar)?.divergence().norm_l2()
            }
            (State::Ise(psi), "energy") => {
                0.5 * velocity_from_psi(psi, self.hbar)?.norm_sq().integrate()
            }
            (State::Heat(rho), "entropy") => rho.map(|r| r * r.ln()).integrate(),
            (State::HjViscous(theta), "theta_max") => theta.max_abs(),
            (State::HjViscous(theta), "theta_l2") => theta.norm_l2(),
            (state, "mass") => density_of(state).expect("density system").integrate(),
            (state, "min_rho") => density_of(state).expect("density system").min(),
            (_, other) => unreachable!("diagnostic {other} was validated against the system"),
        };
        Ok(value)
    }

    /// The current state as named fields.
    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        use FieldData::{Complex, Scalar, Vector};
        let snap = Snapshot::new(self.grid.clone()).with_time(t);
        let snap = match &self.state {
            State::NewtonWo(s) => snap
                .with("rho", Scalar(s.rho.field().clone()))?
                .with("theta", Scalar(s.theta.field().clone()))?,
            State::Eulerian(s) => snap
                .with("rho", Scalar(s.rho.field().clone()))?
                .with("v", Vector(s.v.clone()))?,
            State::FullCompressible(s) => snap
                .with("rho", Scalar(s.rho.field().clone()))?
                .with("v", Scalar(s.v.clone()))?
                .with("sigma", Scalar(s.sigma.clone()))?,
            State::Relativistic(s) => snap
                .with("rho", Scalar(s.rho.field().clone()))?
                .with("m", Scalar(s.m.clone()))?,
            State::Euler2d(w) => snap
                .with("omega", Scalar(w.field().clone()))?
                .with("v", Vector(w.velocity()))?,
            State::NewtonFr(s) => snap
                .with("rho", Scalar(s.rho.field().clone()))?
                .with("theta", Scalar(s.theta.field().clone()))?,
            State::Neumann(s) => snap
                .with("f", Scalar(s.f.clone()))?
                .with("f_dot", Scalar(s.f_dot.clone()))?,
            State::Schrodinger(psi) => snap.with("psi", Complex(psi.field().clone()))?,
            State::Ise(psi) => snap
                .with("psi1", Complex(psi.first().clone()))?
                .with("psi2", Complex(psi.second().clone()))?,
            State::Heat(rho) => snap.with("rho", Scalar(rho.field().clone()))?,
            State::HjViscous(theta) => snap.with("theta", Scalar(theta.field().clone()))?,
        };
        Ok(snap)
    }
}

fn density_of(state: &State) -> Option<&Density> {
    match state {
        State::NewtonWo(s) => Some(&s.rho),
        State::Eulerian(s) => Some(&s.rho),
        State::FullCompressible(s) => Some(&s.rho),
        State::Relativistic(s) => Some(&s.rho),
        State::NewtonFr(s) => Some(&s.rho),
        State::Heat(rho) => Some(rho),
        _ => None,
    }
}

/// `ħ` from the top level or from a `wkb` profile; the two must agree.
fn effective_hbar(config: &ScenarioConfig) -> Result<f64> {
    let profile = match config.initial {
        InitialCondition::Wkb { hbar, .. } => hbar,
        _ => None,
    };
    match (config.hbar, profile) {
        (Some(a), Some(b)) if a != b => Err(CliError::config(format!(
            "hbar {a} conflicts with the wkb profile's hbar {b}"
        ))),
        (Some(h), _) | (None, Some(h)) => Ok(h),
        (None, None) => match config.system {
            SystemKind::Schrodinger | SystemKind::Ise => Err(CliError::config(format!(
                "system {:?} needs hbar",
                config.system
            ))),
            _ => Ok(0.0),
        },
    }
}

fn initial_state(config: &ScenarioConfig, data: &InitialData, hbar: f64) -> Result<State> {
    let rho = data.rho.clone();
    let theta = data.theta.clone();
    let state = match config.system {
        SystemKind::NewtonWo => State::NewtonWo(WOState::new(rho, theta)?),
        SystemKind::Eulerian => State::Eulerian(EulerianState::new(data.velocity(), rho)?),
        SystemKind::FullCompressible => {
            let sigma = rho.field().scale(config.entropy_ratio);
            State::FullCompressible(FullState::new(theta.derivative(0)?, rho, sigma)?)
        }
        SystemKind::Relativistic => {
            let c = config.c.expect("validated");
            State::Relativistic(RelState::from_velocity(rho, &theta.derivative(0)?, c)?)
        }
        SystemKind::Euler2d => State::Euler2d(Vorticity2D::new(data.velocity().curl_2d()?)?),
        SystemKind::NewtonFr => State::NewtonFr(FRState::new(rho, theta)?),
        SystemKind::Neumann => {
            let gauged = ThetaFR::new(theta, &rho)?;
            let f = sqrt_map(&rho);
            let f_dot = (gauged.field() * &f).scale(0.5);
            State::Neumann(NeumannState::new(f, f_dot)?)
        }
        SystemKind::Schrodinger => State::Schrodinger(madelung(&rho, &theta, hbar)?),
        SystemKind::Ise => {
            let first = rho.map(|r| r / (r + 1.0));
            let second = rho.map(|r| 1.0 / (r + 1.0));
            let psi =
                two_component_madelung((&first, &theta), (&second, &rho.grid().zeros()), hbar)?;
            // A zero-length step projects onto divergence-free velocities.
            State::Ise(step_ise(&psi, hbar, 0.0)?)
        }
        SystemKind::Heat => State::Heat(rho),
        SystemKind::HjViscous => State::HjViscous(ThetaWO::new(theta)),
    };
    Ok(state)
}

/// Files written by a run.
#[derive(Debug)]
pub struct RunOutput {
    pub diagnostics: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub steps: usize,
}

fn snapshot_path(out: &Path, step: usize) -> PathBuf {
    out.join(format!("snap_{step:06}.toml"))
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Integrates the scenario to `t_end`, shortening the last step so that the
/// run ends exactly there.
pub fn run(config: &ScenarioConfig, out: &Path) -> Result<RunOutput> {
    let mut sim = Simulation::new(config)?;
    let steps = if config.t_end == 0.0 {
        0
    } else {
        (config.t_end / config.dt * (1.0 - 1e-12)).ceil() as usize
    };
    if let Some(speed) = sim.signal_speed() {
        let bound = cfl_bound(sim.grid.min_spacing(), speed);
        if config.dt > bound {
            eprintln!(
                "warning: dt {} exceeds the advective bound {bound:.3e}",
                config.dt
            );
        }
    }
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let csv_path = out.join("diagnostics.csv");
    let file = File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    let mut header = vec!["t".to_string()];
    header.extend(sim.columns().iter().cloned());
    writer.write_record(&header)?;

    let mut snapshots = Vec::new();
    let mut t = 0.0;
    let record = |sim: &Simulation, t: f64, writer: &mut csv::Writer<File>| -> Result<()> {
        let mut row = vec![format_float(t)];
        row.extend(sim.diagnostics()?.into_iter().map(format_float));
        writer.write_record(&row)?;
        Ok(())
    };
    record(&sim, t, &mut writer)?;
    let path = snapshot_path(out, 0);
    sim.snapshot(t)?.write(&path)?;
    snapshots.push(path);

    let result = (1..=steps).try_for_each(|k| -> Result<()> {
        let next = if k == steps {
            config.t_end
        } else {
            k as f64 * config.dt
        };
        sim.step(next - t)?;
        t = next;
        let last = k == steps;
        if last || k % config.diagnostics_every == 0 {
            record(&sim, t, &mut writer)?;
        }
        if last || (config.snapshot_every > 0 && k % config.snapshot_every == 0) {
            let path = snapshot_path(out, k);
            sim.snapshot(t)?.write(&path)?;
            snapshots.push(path);
        }
        Ok(())
    });
    writer.flush().map_err(|e| CliError::io(&csv_path, e))?;
    result.map_err(|e| match e {
        CliError::Solver(source) => CliError::Step { t, source },
        other => other,
    })?;
    Ok(RunOutput {
        diagnostics: csv_path,
        snapshots,
        steps,
    })
}
