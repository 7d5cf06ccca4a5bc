#![allow(dead_code)]

use geodens::{Density, Grid, ScalarField};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid1(n: usize) -> Grid {
    Grid::periodic(&[n]).unwrap()
}

pub fn grid2(n: usize) -> Grid {
    Grid::periodic(&[n, n]).unwrap()
}

pub fn grid3(n: usize) -> Grid {
    Grid::periodic(&[n, n, n]).unwrap()
}

/// Random trigonometric polynomial with modes `1 <= max|m_a| <= max_mode`,
/// zero mean, rescaled so that its largest value is `amplitude`.
pub fn random_field(
    grid: &Grid,
    rng: &mut ChaCha8Rng,
    max_mode: i64,
    amplitude: f64,
) -> ScalarField {
    let dim = grid.dim();
    let mut terms = Vec::new();
    let range = -max_mode..=max_mode;
    let mut modes = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for m in &modes {
            for k in range.clone() {
                let mut v: Vec<i64> = m.clone();
                v.push(k);
                next.push(v);
            }
        }
        modes = next;
    }
    for m in modes {
        if m.iter().all(|&k| k == 0) {
            continue;
        }
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        terms.push((m, a, b));
    }
    let f = grid.from_fn(|x| {
        terms
            .iter()
            .map(|(m, a, b)| {
                let phase: f64 = m.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                a * phase.cos() + b * phase.sin()
            })
            .sum()
    });
    let s = amplitude / f.max_abs();
    f.scale(s)
}

pub fn random_density(grid: &Grid, rng: &mut ChaCha8Rng, max_mode: i64, amplitude: f64) -> Density {
    Density::normalized(random_field(grid, rng, max_mode, amplitude).shift(1.0)).unwrap()
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual:e}, expected {expected:e}, tolerance {tol:e}"
    );
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(a.abs()).max(1e-300)
}
