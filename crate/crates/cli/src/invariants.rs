//! Batteries of randomized invariant checks with a machine-readable report.

use std::io::Write;

use clap::ValueEnum;
use geodens::casimirs::{
    coadjoint_perturb, enstrophy_family, helicity, magnetic_helicity, CasimirWeight,
    CoadjointState, Perturbation,
};
use geodens::dynamics_fr::{step_newton_fr, FRState};
use geodens::dynamics_wo::{
    step_eulerian, step_hj_viscous, step_newton_wo, step_relativistic, EulerianState, RelState,
    WOState,
};
use geodens::quantum::{step_schrodinger, SchrodingerParams};
use geodens::spaces::{
    fr_distance, fr_geodesic, fr_metric, fubini_study_metric, sasaki_fr_metric, sqrt_map,
    sqrt_map_differential,
};
use geodens::transforms::{
    canonical_symplectic, madelung, madelung_inverse, madelung_pushforward, projective_symplectic,
};
use geodens::{Density, Grid, Potential, ScalarField, ThetaFR, ThetaWO, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::abc;
use crate::error::Result;
use crate::scenario::format_float;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Round trip, symplectic form and metric of the Madelung transform.
    Madelung,
    /// Square-root isometry, distance and geodesics of the Fisher-Rao metric.
    FisherRao,
    /// Casimir invariance under the coadjoint action.
    Casimirs,
    /// Transforms intertwining the fluid and wave flows.
    Commutation,
    /// Convergence orders of the nonrelativistic and semiclassical limits.
    Limits,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Madelung => "madelung",
            Self::FisherRao => "fisher_rao",
            Self::Casimirs => "casimirs",
            Self::Commutation => "commutation",
            Self::Limits => "limits",
        }
    }
}

/// A measured value compared with an expected one: the check passes when
/// `|measured − expected| ≤ tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.measured - self.expected).abs() <= self.tolerance
    }
}

struct Report {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Report {
    fn error(&mut self, name: &str, measured: f64, tolerance: f64) {
        self.value(name, measured, 0.0, tolerance);
    }

    fn value(&mut self, name: &str, measured: f64, expected: f64, tolerance: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            // NaN never passes.
            measured: if measured.is_nan() {
                f64::INFINITY
            } else {
                measured
            },
            expected,
            tolerance,
        });
    }
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report {
        suite: suite.name(),
        checks: Vec::new(),
    };
    let trials = trials.max(1);
    match suite {
        Suite::Madelung => madelung_suite(&mut report, &mut rng, trials)?,
        Suite::FisherRao => fisher_rao_suite(&mut report, &mut rng, trials)?,
        Suite::Casimirs => casimir_suite(&mut report, &mut rng, trials)?,
        Suite::Commutation => commutation_suite(&mut report)?,
        Suite::Limits => limits_suite(&mut report, &mut rng)?,
    }
    Ok(report.checks)
}

pub fn write_report(checks: &[Check], sink: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record([
        "suite",
        "check",
        "measured",
        "expected",
        "tolerance",
        "status",
    ])?;
    for c in checks {
        writer.write_record([
            c.suite.to_string(),
            c.name.clone(),
            format_float(c.measured),
            format_float(c.expected),
            format_float(c.tolerance),
            if c.passed() { "pass" } else { "fail" }.to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn grid(n: usize, dim: usize) -> Grid {
    Grid::periodic(&vec![n; dim]).expect("power-of-two grid")
}

/// Zero-mean trigonometric polynomial with modes `1 ≤ max|m_a| ≤ max_mode`,
/// scaled so that its largest value is `amplitude`.
fn random_field(g: &Grid, rng: &mut ChaCha8Rng, max_mode: i64, amplitude: f64) -> ScalarField {
    let mut modes: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..g.dim() {
        modes = modes
            .into_iter()
            .flat_map(|m| {
                (-max_mode..=max_mode).map(move |k| {
                    let mut next = m.clone();
                    next.push(k);
                    next
                })
            })
            .collect();
    }
    let terms: Vec<(Vec<i64>, f64, f64)> = modes
        .into_iter()
        .filter(|m| m.iter().any(|&k| k != 0))
        .map(|m| (m, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let f = g.from_fn(|x| {
        terms
            .iter()
            .map(|(m, a, b)| {
                let phase: f64 = m.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                a * phase.cos() + b * phase.sin()
            })
            .sum()
    });
    let scale = amplitude / f.max_abs();
    f.scale(scale)
}

fn random_density(
    g: &Grid,
    rng: &mut ChaCha8Rng,
    max_mode: i64,
    amplitude: f64,
) -> Result<Density> {
    Ok(Density::normalized(
        random_field(g, rng, max_mode, amplitude).shift(1.0),
    )?)
}

fn random_vector(
    g: &Grid,
    rng: &mut ChaCha8Rng,
    max_mode: i64,
    amplitude: f64,
) -> Result<VectorField> {
    Ok(VectorField::from_components(
        (0..g.dim())
            .map(|_| random_field(g, rng, max_mode, amplitude))
            .collect(),
    )?)
}

/// Divergence-free field with peak speed `amplitude`.
fn solenoidal(
    g: &Grid,
    rng: &mut ChaCha8Rng,
    max_mode: i64,
    amplitude: f64,
) -> Result<VectorField> {
    let v = if g.dim() == 2 {
        let psi = random_field(g, rng, max_mode, 1.0);
        VectorField::from_components(vec![-psi.derivative(1)?, psi.derivative(0)?])?
    } else {
        random_vector(g, rng, max_mode, 1.0)?.curl()?
    };
    let peak = v.norm_sq().max().sqrt();
    Ok(v.scale(amplitude / peak))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn madelung_suite(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) -> Result<()> {
    let g = grid(64, 1);
    let (mut modulus, mut round_trip, mut symplectic, mut isometry) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let hbar = rng.gen_range(0.3..3.0);
        let rho = random_density(&g, rng, 3, 0.6)?;
        let theta = random_field(&g, rng, 3, 1.0);
        let psi = madelung(&rho, &theta, hbar)?;
        modulus = modulus.max(psi.abs_sq().linf_distance(&rho));
        let (rho2, theta2) = madelung_inverse(&psi, hbar)?;
        round_trip = round_trip
            .max(rho2.linf_distance(&rho))
            .max(theta2.linf_distance(&theta.zero_mean()));

        let t: Vec<ScalarField> = (0..4).map(|_| random_field(&g, rng, 3, 1.0)).collect();
        let p1 = madelung_pushforward(&rho, &theta, &t[0], &t[1], hbar)?;
        let p2 = madelung_pushforward(&rho, &theta, &t[2], &t[3], hbar)?;
        let canonical = canonical_symplectic((&t[0], &t[1]), (&t[2], &t[3]))?;
        symplectic = symplectic.max(rel_err(projective_symplectic(&p1, &p2, hbar)?, canonical));

        let b1 = ThetaFR::new(t[1].clone(), &rho)?.into_field();
        let b2 = ThetaFR::new(t[3].clone(), &rho)?.into_field();
        let psi2 = madelung(&rho, &theta, 2.0)?;
        let q1 = madelung_pushforward(&rho, &theta, &t[0], &b1, 2.0)?;
        let q2 = madelung_pushforward(&rho, &theta, &t[2], &b2, 2.0)?;
        let fs = fubini_study_metric(&psi2, &q1, &q2)?;
        let sasaki = sasaki_fr_metric(&rho, (&t[0], &b1), (&t[2], &b2))?;
        isometry = isometry.max(rel_err(sasaki, 4.0 * fs));
    }
    report.error("modulus_squared_is_density", modulus, 1e-12);
    report.error("round_trip", round_trip, 1e-10);
    report.error("symplectomorphism", symplectic, 1e-10);
    report.error("isometry_factor_four_at_hbar_2", isometry, 1e-9);
    Ok(())
}

fn fisher_rao_suite(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) -> Result<()> {
    let g = grid(64, 1);
    let (mut isometry, mut symmetry, mut triangle, mut bound) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut speed, mut mass) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let rho = random_density(&g, rng, 3, 0.7)?;
        let a = random_field(&g, rng, 3, 1.0);
        let b = random_field(&g, rng, 3, 1.0);
        let sphere = sqrt_map_differential(&rho, &a)?.inner(&sqrt_map_differential(&rho, &b)?);
        isometry = isometry.max(rel_err(fr_metric(&rho, &a, &b)?, 4.0 * sphere));

        let d: Vec<Density> = (0..3)
            .map(|_| random_density(&g, rng, 3, 0.8))
            .collect::<Result<_>>()?;
        let ab = fr_distance(&d[0], &d[1])?;
        symmetry = symmetry.max((ab - fr_distance(&d[1], &d[0])?).abs());
        let via = fr_distance(&d[0], &d[2])? + fr_distance(&d[2], &d[1])?;
        triangle = triangle.max(ab - via);
        bound = bound.max(ab - std::f64::consts::PI);

        let s = rng.gen_range(0.0..1.0);
        let mid = fr_geodesic(&d[0], &d[1], s)?;
        speed = speed.max((fr_distance(&d[0], &mid)? - s * ab).abs());
        mass = mass.max((mid.integrate() - 1.0).abs());
    }
    report.error("sqrt_map_isometry_factor_four", isometry, 1e-9);
    report.error("distance_symmetry", symmetry, 1e-13);
    report.error("triangle_inequality_excess", triangle.max(0.0), 1e-12);
    report.error("distance_above_pi", bound.max(0.0), 1e-12);
    report.error("geodesic_constant_speed", speed, 1e-9);
    report.error("geodesic_mass", mass, 1e-12);

    // Newton's equation with zero potential is the geodesic flow: a great
    // circle through √ρ₀ on the sphere.
    let g = grid(128, 1);
    let rho0 = random_density(&g, rng, 3, 0.4)?;
    let raw = FRState::new(rho0.clone(), random_field(&g, rng, 3, 1.0))?;
    let theta0 = raw.theta.field().scale(1.0 / raw.speed());
    let mut s = FRState::new(rho0.clone(), theta0.clone())?;
    let (dt, steps) = (1e-3, 300);
    for _ in 0..steps {
        s = step_newton_fr(&s, &Potential::Zero, dt)?;
    }
    let t = dt * steps as f64;
    let f0 = sqrt_map(&rho0);
    let v0 = (&theta0 * &f0).scale(0.5);
    let w = v0.norm_l2();
    let circle = f0
        .scale((w * t).cos())
        .axpy((w * t).sin() / w, &v0)
        .map(|x| x * x);
    report.error(
        "newton_flow_is_great_circle",
        s.rho.linf_distance(&circle),
        1e-7,
    );
    Ok(())
}

fn casimir_suite(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) -> Result<()> {
    let g = grid(128, 2);
    let state = CoadjointState::new(
        random_vector(&g, rng, 2, 1.0)?,
        random_density(&g, rng, 2, 0.4)?.into_field(),
        None,
    )?;
    let enstrophies = |s: &CoadjointState| -> Result<Vec<f64>> {
        let w = s.vorticity_2d()?;
        CasimirWeight::ALL
            .iter()
            .map(|&h| Ok(enstrophy_family(&w, &s.rho, h)?))
            .collect()
    };
    let before = enstrophies(&state)?;
    let mut worst = [0.0f64; 4];
    for _ in 0..trials {
        let mut p = Perturbation::flow(solenoidal(&g, rng, 2, 0.3)?, 1.0);
        p.exact = Some(random_field(&g, rng, 3, 0.5));
        let after = enstrophies(&coadjoint_perturb(&state, &p)?)?;
        for (w, (a, b)) in worst.iter_mut().zip(after.iter().zip(&before)) {
            *w = w.max(rel_err(*a, *b));
        }
    }
    for (h, w) in CasimirWeight::ALL.iter().zip(worst) {
        report.error(&format!("enstrophy_{}_coadjoint", h.name()), w, 1e-6);
    }

    let g = grid(16, 3);
    let alpha = random_vector(&g, rng, 1, 1.0)?;
    let h0 = helicity(&alpha)?;
    let ideal = CoadjointState::new(alpha, g.constant(1.0), None)?;
    let (mut flow, mut exact) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let mut p = Perturbation::flow(solenoidal(&g, rng, 1, 0.2)?, 1.0);
        p.exact = Some(random_field(&g, rng, 2, 0.5));
        flow = flow.max(rel_err(
            helicity(&coadjoint_perturb(&ideal, &p)?.alpha)?,
            h0,
        ));
        let shifted = &ideal.alpha + &p.exact.as_ref().expect("set above").gradient();
        exact = exact.max(rel_err(helicity(&shifted)?, h0));
    }
    report.error("helicity_coadjoint", flow, 1e-6);
    report.error("helicity_exact_shift", exact, 1e-10);

    let g = grid(32, 3);
    let field = abc(&g, 1.0, 1.0, 1.0)?;
    report.value("abc_helicity", helicity(&field)?, 3.0, 1e-10);
    report.value(
        "abc_magnetic_helicity",
        magnetic_helicity(&field)?,
        3.0,
        1e-10,
    );
    Ok(())
}

fn commutation_suite(report: &mut Report) -> Result<()> {
    // Fluid with quantum pressure against the Schrödinger equation.
    let g = grid(64, 1);
    let (hbar, t, dt) = (1.0, 0.1, 1e-3);
    let steps = (t / dt) as usize;
    let rho0 = Density::normalized(g.from_fn(|x| 1.0 + 0.05 * x[0].cos()))?;
    let theta0 = g.from_fn(|x| 0.05 * x[0].sin());
    let external = g.from_fn(|x| x[0].cos());
    let u = Potential::Sum(vec![
        Potential::quantum_pressure(hbar),
        Potential::Linear(external.clone()),
    ]);
    let mut fluid = WOState::new(rho0.clone(), theta0.clone())?;
    let mut p = SchrodingerParams::free(&g, hbar);
    p.potential = external;
    let mut psi = madelung(&rho0, &theta0, hbar)?;
    for _ in 0..steps {
        fluid = step_newton_wo(&fluid, &u, dt)?;
        psi = step_schrodinger(&psi, &p, dt)?;
    }
    let (rho, theta) = madelung_inverse(&psi, hbar)?;
    report.error(
        "madelung_schrodinger_density",
        rho.l2_distance(&fluid.rho),
        1e-6,
    );
    report.error(
        "madelung_schrodinger_phase",
        theta.l2_distance(&fluid.theta.zero_mean()),
        1e-6,
    );

    // Viscous Hamilton-Jacobi against the heat equation for exp(−θ/2γ).
    let g = grid(128, 1);
    let gamma = 1.0;
    let exact =
        |t: f64| g.from_fn(|x| -2.0 * gamma * (1.0 + 0.5 * (-gamma * t).exp() * x[0].cos()).ln());
    let mut theta = ThetaWO::new(exact(0.0));
    let steps = 200;
    for _ in 0..steps {
        theta = step_hj_viscous(&theta, gamma, 0.5 / steps as f64);
    }
    report.error(
        "hopf_cole_heat",
        theta.linf_distance(&exact(0.5).zero_mean()),
        1e-7,
    );
    Ok(())
}

/// `(m, ρ)` distance between relativistic and classical runs at `t = 0.1`.
fn relativistic_gap(rho: &Density, v: &ScalarField, c: f64) -> Result<f64> {
    let mut rel = RelState::from_velocity(rho.clone(), v, c)?;
    let mut classical =
        EulerianState::new(VectorField::from_components(vec![v.clone()])?, rho.clone())?;
    for _ in 0..100 {
        rel = step_relativistic(&rel, c, 1e-3)?;
        classical = step_eulerian(&classical, &Potential::Zero, 1e-3)?;
    }
    let momentum = classical.v.component(0) * classical.rho.field();
    Ok(rel
        .m
        .l2_distance(&momentum)
        .hypot(rel.rho.l2_distance(&classical.rho)))
}

/// `θ` of the pressureless Hamilton-Jacobi equation by characteristics from
/// `θ₀ = ε sin x`.
fn characteristics(x: f64, t: f64, eps: f64) -> f64 {
    let u0 = |y: f64| eps * y.cos();
    let mut y = x;
    for _ in 0..100 {
        let step = (y + t * u0(y) - x) / (1.0 - t * eps * y.sin());
        y -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    eps * y.sin() + 0.5 * t * u0(y) * u0(y)
}

fn limits_suite(report: &mut Report, rng: &mut ChaCha8Rng) -> Result<()> {
    let g = grid(128, 1);
    let rho = random_density(&g, rng, 2, 0.3)?;
    let v = random_field(&g, rng, 2, 0.3);
    let gaps: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&c| relativistic_gap(&rho, &v, c))
        .collect::<Result<_>>()?;
    for (k, pair) in gaps.windows(2).enumerate() {
        let order = (pair[0] / pair[1]).log10();
        report.value(&format!("speed_of_light_order_{}", k + 1), order, 2.0, 0.4);
    }

    let g = grid(512, 1);
    let (eps, t) = (0.3, 1.0);
    let exact = g.from_fn(|x| characteristics(x[0], t, eps)).zero_mean();
    let rho = Density::normalized(g.from_fn(|x| 1.0 + eps * x[0].cos()))?;
    let theta = g.from_fn(|x| eps * x[0].sin());
    let errors: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&hbar| -> Result<f64> {
            let psi = madelung(&rho, &theta, hbar)?;
            // The free propagator is exact, so one step covers the interval.
            let psi = step_schrodinger(&psi, &SchrodingerParams::free(&g, hbar), t)?;
            Ok(madelung_inverse(&psi, hbar)?.1.linf_distance(&exact))
        })
        .collect::<Result<_>>()?;
    for (k, pair) in errors.windows(2).enumerate() {
        let order = (pair[0] / pair[1]).log2();
        report.value(&format!("planck_constant_order_{}", k + 1), order, 2.0, 0.4);
    }
    Ok(())
}
