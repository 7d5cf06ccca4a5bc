//! Evaluation of band-limited grid fields at arbitrary points by summing
//! their retained Fourier modes.
//!
//! Coefficients below a relative threshold are dropped, so the cost per
//! point scales with the number of significant modes rather than the grid
//! size. A Nyquist mode is read as a cosine, which keeps the interpolant real.
//! All fields share one mode table, and since the fields are real only one
//! mode of each conjugate pair is summed.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::field::ScalarField;
use crate::grid::Grid;

/// Coefficients smaller than this fraction of the field's largest one are
/// treated as round-off and dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-13;

/// Samples a fixed list of fields at arbitrary points.
#[derive(Clone, Debug)]
pub struct FieldSampler {
    dim: usize,
    base: [f64; 3],
    reach: [i64; 3],
    modes: Vec<[i64; 3]>,
    /// `modes.len() × fields` coefficients, already doubled for paired modes.
    coeffs: Vec<Complex64>,
    counts: Vec<usize>,
}

/// First nonzero component positive, or the zero mode.
fn is_canonical(m: &[i64; 3]) -> bool {
    m.iter().find(|&&k| k != 0).is_none_or(|&k| k > 0)
}

impl FieldSampler {
    pub fn new(grid: &Grid, fields: &[&ScalarField]) -> Self {
        let dim = grid.dim();
        let mut base = [0.0; 3];
        for (a, b) in base.iter_mut().enumerate().take(dim) {
            *b = grid.base_wavenumber(a);
        }
        let nf = fields.len();
        let mut table: BTreeMap<[i64; 3], Vec<Complex64>> = BTreeMap::new();
        let mut counts = Vec::with_capacity(nf);
        for (fi, f) in fields.iter().enumerate() {
            assert_eq!(f.grid(), grid, "grid mismatch");
            let modes = expanded_modes(f);
            counts.push(modes.len());
            for (m, c) in modes {
                if !is_canonical(&m) {
                    continue;
                }
                let weight = if m == [0; 3] { 1.0 } else { 2.0 };
                table
                    .entry(m)
                    .or_insert_with(|| vec![Complex64::new(0.0, 0.0); nf])[fi] += c * weight;
            }
        }
        let mut reach = [0i64; 3];
        for m in table.keys() {
            for a in 0..dim {
                reach[a] = reach[a].max(m[a].abs());
            }
        }
        let modes: Vec<[i64; 3]> = table.keys().copied().collect();
        let coeffs = table.into_values().flatten().collect();
        Self {
            dim,
            base,
            reach,
            modes,
            coeffs,
            counts,
        }
    }

    /// Number of retained modes per field.
    pub fn mode_counts(&self) -> Vec<usize> {
        self.counts.clone()
    }

    /// Writes the value of every field at `x` into `out`.
    pub fn sample(&self, x: &[f64], out: &mut [f64]) {
        let nf = self.counts.len();
        let mut tables: [Vec<Complex64>; 3] = Default::default();
        for a in 0..self.dim {
            let r = self.reach[a] as usize;
            let step = Complex64::from_polar(1.0, self.base[a] * x[a]);
            let mut t = vec![Complex64::new(1.0, 0.0); 2 * r + 1];
            for m in 1..=r {
                t[r + m] = t[r + m - 1] * step;
                t[r - m] = t[r - m + 1] * step.conj();
            }
            tables[a] = t;
        }
        out[..nf].iter_mut().for_each(|o| *o = 0.0);
        for (m, row) in self.modes.iter().zip(self.coeffs.chunks_exact(nf)) {
            let mut e = tables[0][(m[0] + self.reach[0]) as usize];
            for a in 1..self.dim {
                e *= tables[a][(m[a] + self.reach[a]) as usize];
            }
            for (o, c) in out.iter_mut().zip(row) {
                *o += c.re * e.re - c.im * e.im;
            }
        }
    }
}

/// Significant modes of `field` with Nyquist modes split into two halves.
fn expanded_modes(field: &ScalarField) -> Vec<([i64; 3], Complex64)> {
    let grid = field.grid();
    let dim = grid.dim();
    let coeffs = field.fourier_coefficients();
    let largest = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let cutoff = largest * PRUNE_TOLERANCE;
    let mut modes = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c.norm() <= cutoff || c.norm() == 0.0 {
            continue;
        }
        let mut expanded = vec![([0i64; 3], c)];
        for a in 0..dim {
            let n = grid.shape()[a] as i64;
            let m = grid.mode(i, a);
            let mut next = Vec::with_capacity(expanded.len() * 2);
            for (mut idx, coef) in expanded {
                if m == -n / 2 {
                    let mut other = idx;
                    idx[a] = m;
                    other[a] = -m;
                    next.push((idx, coef * 0.5));
                    next.push((other, coef * 0.5));
                } else {
                    idx[a] = m;
                    next.push((idx, coef));
                }
            }
            expanded = next;
        }
        modes.extend(expanded);
    }
    modes
}
