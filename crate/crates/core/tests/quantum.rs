mod common;

use common::*;
use geodens::quantum::*;
use geodens::transforms::{madelung, madelung_inverse, two_component_madelung};
use geodens::{ComplexField, Density, Nonlinearity, Potential, WaveFunction};
use num_complex::Complex64;

fn plane_wave(g: &geodens::Grid, k: f64, t_shift: f64) -> WaveFunction {
    WaveFunction::new(g.complex_from_fn(|x| Complex64::from_polar(1.0, k * x[0] - t_shift)))
        .unwrap()
}

#[test]
fn plane_wave_dispersion() {
    let g = grid1(64);
    let p = SchrodingerParams::free(&g, 2.0);
    let mut psi = plane_wave(&g, 1.0, 0.0);
    for _ in 0..100 {
        psi = step_schrodinger(&psi, &p, 1e-2).unwrap();
    }
    assert!(psi.linf_distance(&plane_wave(&g, 1.0, 1.0)) < 1e-12);
    assert_close(
        schrodinger_hamiltonian(&psi, &p).unwrap(),
        2.0,
        1e-12,
        "plane-wave energy",
    );
    let one = g.constant(1.0).to_complex();
    assert_eq!(schrodinger_hamiltonian(&one, &p).unwrap(), 0.0);
}

/// Ground state of `−(ħ²/2)∂² + ε cos x` by shifted inverse iteration on the
/// tridiagonal Fourier matrix restricted to `|k| ≤ K`.
fn ground_state(g: &geodens::Grid, hbar: f64, eps: f64) -> WaveFunction {
    const K: i64 = 20;
    let n = (2 * K + 1) as usize;
    let shift = -eps - 1.0;
    let diag: Vec<f64> = (-K..=K)
        .map(|k| 0.5 * hbar * hbar * (k * k) as f64 - shift)
        .collect();
    let off = 0.5 * eps;
    let mut c = vec![1.0; n];
    for _ in 0..100 {
        // Thomas algorithm for (H − shift) x = c.
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = off / diag[0];
        dp[0] = c[0] / diag[0];
        for i in 1..n {
            let m = diag[i] - off * cp[i - 1];
            cp[i] = off / m;
            dp[i] = (c[i] - off * dp[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        c = x.into_iter().map(|v| v / norm).collect();
    }
    let psi = g.complex_from_fn(|x| {
        let re: f64 = (-K..=K)
            .zip(&c)
            .map(|(k, a)| a * (k as f64 * x[0]).cos())
            .sum();
        Complex64::new(re, 0.0)
    });
    WaveFunction::normalized(psi).unwrap()
}

#[test]
fn ground_state_is_stationary() {
    let g = grid1(128);
    let (hbar, eps) = (2.0, 0.5);
    let psi0 = ground_state(&g, hbar, eps);
    let mut p = SchrodingerParams::free(&g, hbar);
    p.potential = g.from_fn(|x| eps * x[0].cos());
    let drift = |dt: f64| {
        let mut psi = psi0.clone();
        for _ in 0..(1.0 / dt).round() as usize {
            psi = step_schrodinger(&psi, &p, dt).unwrap();
        }
        psi.abs().linf_distance(&psi0.abs())
    };
    let (d1, d2) = (drift(2e-3), drift(1e-3));
    assert!(d2 < 1e-5, "drift {d2:e}");
    assert!(d1 / d2 > 3.5, "ratio {}", d1 / d2);
}

fn wkb(g: &geodens::Grid, hbar: f64) -> WaveFunction {
    let rho = Density::normalized(g.from_fn(|x| 1.0 + 0.3 * x[0].cos())).unwrap();
    let theta = g.from_fn(|x| 0.2 * x[0].sin());
    madelung(&rho, &theta, hbar).unwrap()
}

#[test]
fn hamiltonian_drift_and_unitarity() {
    let g = grid1(256);
    let mut p = SchrodingerParams::free(&g, 2.0);
    p.potential = g.from_fn(|x| x[0].cos());
    p.nonlinearity = Nonlinearity::Cubic { kappa: 0.5 };
    let mut psi = wkb(&g, 2.0);
    let h0 = schrodinger_hamiltonian(&psi, &p).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        psi = step_schrodinger(&psi, &p, 1e-4).unwrap();
        worst = worst.max((schrodinger_hamiltonian(&psi, &p).unwrap() - h0).abs());
    }
    assert!(worst < 1e-8, "drift {worst:e}");
    assert!((psi.norm_sq() - 1.0).abs() < 1e-12);
}

#[test]
fn hamiltonian_matches_fluid_form() {
    let g = grid1(128);
    let mut r = rng(70);
    for hbar in [0.5, 2.0] {
        let rho = random_density(&g, &mut r, 3, 0.5);
        let theta = random_field(&g, &mut r, 3, 1.0);
        let v = random_field(&g, &mut r, 3, 1.0);
        let f = Nonlinearity::Saturating;
        let mut p = SchrodingerParams::free(&g, hbar);
        p.potential = v.clone();
        p.nonlinearity = f.clone();
        let psi = madelung(&rho, &theta, hbar).unwrap();
        let h = schrodinger_hamiltonian(&psi, &p).unwrap();
        let (rho2, theta2) = madelung_inverse(&psi, hbar).unwrap();
        let u = Potential::Sum(vec![
            Potential::quantum_pressure(hbar),
            Potential::Linear(v),
            Potential::Pointwise(f),
        ]);
        let fluid = 0.5 * theta2.gradient().norm_sq().inner(&rho2) + u.value(&rho2).unwrap();
        assert!(
            (h - fluid).abs() < 1e-10 * h.abs().max(1.0),
            "{h} vs {fluid}"
        );
    }
}

#[test]
fn heat_examples() {
    let g = grid1(64);
    let one = g.constant(1.0);
    assert_eq!(step_heat(&one, 0.7, 1.0).linf_distance(&one), 0.0);
    let eta = g.from_fn(|x| 1.0 + 0.5 * x[0].cos());
    let (gamma, t): (f64, f64) = (0.7, 0.4);
    let exact = g.from_fn(|x| 1.0 + 0.5 * (-gamma * t).exp() * x[0].cos());
    assert!(step_heat(&eta, gamma, t).linf_distance(&exact) < 1e-15);

    let mut r = rng(71);
    let band = random_field(&g, &mut r, 4, 0.5).shift(1.0);
    let forward = step_heat(&band, gamma, 0.5);
    let back = step_heat(&forward, -gamma, 0.5);
    assert!(back.linf_distance(&band) < 1e-10);
    // High modes beyond the gain clip are discarded rather than amplified.
    let noisy = g.from_fn(|x| (30.0 * x[0]).cos());
    assert!(step_heat(&noisy, -1.0, 1.0).max_abs() < 1e-9);
}

#[test]
fn velocity_from_psi_examples() {
    let g = grid2(64);
    let c = g.constant(1.0).to_complex();
    let w = geodens::quantum::TwoComponentWave::new(c, g.zeros().to_complex()).unwrap();
    assert!(velocity_from_psi(&w, 2.0).unwrap().norm_l2() < 1e-15);

    let mut r = rng(72);
    let rho = random_density(&g, &mut r, 2, 0.3);
    let theta = random_field(&g, &mut r, 2, 0.5);
    let hbar = 1.0;
    let single =
        two_component_madelung((rho.field(), &theta), (&g.zeros(), &g.zeros()), hbar).unwrap();
    let v = velocity_from_psi(&single, hbar).unwrap();
    assert!(v.linf_distance(&theta.gradient()) < 1e-10);
}

fn smoke_initial(g: &geodens::Grid) -> TwoComponentWave {
    let a = g.from_fn(|x| 0.5 + 0.2 * x[0].cos() * x[1].sin());
    let b = a.map(|v| 1.0 - v);
    let t1 = g.from_fn(|x| 0.3 * x[1].sin() + 0.1 * x[0].cos());
    let t2 = g.from_fn(|x| -0.2 * x[0].sin());
    two_component_madelung((&a, &t1), (&b, &t2), 1.0).unwrap()
}

#[test]
fn ise_constraints() {
    let g = grid2(64);
    let fixed =
        TwoComponentWave::new(g.constant(1.0).to_complex(), g.zeros().to_complex()).unwrap();
    let out = step_ise(&fixed, 1.0, 1e-3).unwrap();
    assert!(out.first().linf_distance(&g.constant(1.0).to_complex()) < 1e-15);
    assert_eq!(out.second().max_abs(), 0.0);

    let mut psi = smoke_initial(&g);
    for _ in 0..200 {
        psi = step_ise(&psi, 1.0, 1e-3).unwrap();
        assert!(psi.density().linf_distance(&g.constant(1.0)) < 1e-12);
        let div = velocity_from_psi(&psi, 1.0).unwrap().divergence().norm_l2();
        assert!(div < 1e-6, "divergence {div:e}");
    }
    assert!(step_ise(
        &TwoComponentWave::new(
            grid1(16).zeros().to_complex(),
            grid1(16).zeros().to_complex()
        )
        .unwrap(),
        1.0,
        1e-3
    )
    .is_err());
    let _: &ComplexField = psi.first();
}
