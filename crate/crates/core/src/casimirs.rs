//! Casimir functionals of ideal fluids and magnetohydrodynamics on periodic
//! domains, and a coadjoint-action perturbation used to test their
//! invariance.
//!
//! Fields with a nonzero mean Fourier mode have no periodic vector potential;
//! the magnetic functionals reject them instead of guessing a harmonic part.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::interp::FieldSampler;

/// Relative divergence tolerance for magnetic fields.
pub const SOLENOIDAL_TOLERANCE: f64 = 1e-8;
/// Divergence tolerance for perturbation generators.
pub const GENERATOR_TOLERANCE: f64 = 1e-10;
/// Refinement factor for integrating the weight `|s|`.
pub const ABS_REFINEMENT: usize = 8;

/// The weight `h` of a generalized enstrophy `∫ h(ω/ρ) ρ μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CasimirWeight {
    Square,
    Cube,
    Fourth,
    Abs,
}

impl CasimirWeight {
    pub const ALL: [CasimirWeight; 4] = [Self::Square, Self::Cube, Self::Fourth, Self::Abs];

    pub fn eval(self, s: f64) -> f64 {
        match self {
            Self::Square => s * s,
            Self::Cube => s * s * s,
            Self::Fourth => (s * s) * (s * s),
            Self::Abs => s.abs(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Square => "s2",
            Self::Cube => "s3",
            Self::Fourth => "s4",
            Self::Abs => "abs",
        }
    }
}

/// `∫ v · curl v μ` on a 3D grid.
pub fn helicity(v: &VectorField) -> Result<f64> {
    Ok(v.dot(&v.curl()?).integrate())
}

fn scale_of(b: &VectorField) -> f64 {
    b.norm_l2().max(1.0)
}

fn check_magnetic(b: &VectorField) -> Result<()> {
    b.grid().require_dim(3)?;
    let scale = scale_of(b);
    let div = b.divergence().norm_l2();
    if div > SOLENOIDAL_TOLERANCE * scale {
        return Err(Error::Constraint(format!(
            "magnetic field has divergence {div:e}"
        )));
    }
    for (a, c) in b.components().iter().enumerate() {
        let mean = c.integrate();
        if mean.abs() > 1e-10 * scale {
            return Err(Error::Constraint(format!(
                "magnetic field component {a} has mean {mean:e}; no periodic vector potential"
            )));
        }
    }
    Ok(())
}

/// Zero-mean `A` with `curl A = B` and `div A = 0`.
pub fn vector_potential(b: &VectorField) -> Result<VectorField> {
    check_magnetic(b)?;
    let grid = b.grid();
    let spec: Vec<Vec<Complex64>> = b
        .components()
        .iter()
        .map(|c| c.fourier_coefficients())
        .collect();
    let (k0, k1, k2) = (grid.kd(0), grid.kd(1), grid.kd(2));
    let kdsq = grid.kdsq();
    let i = Complex64::new(0.0, 1.0);
    let comps = (0..3)
        .map(|a| {
            let s: Vec<Complex64> = (0..grid.len())
                .map(|j| {
                    if kdsq[j] == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let k = [k0[j], k1[j], k2[j]];
                    let (p, q) = ((a + 1) % 3, (a + 2) % 3);
                    i * (k[p] * spec[q][j] - k[q] * spec[p][j]) / kdsq[j]
                })
                .collect();
            ScalarField::from_raw(grid.clone(), grid.real_from_spectrum(s))
        })
        .collect();
    VectorField::from_components(comps)
}

/// `∫ A · B μ` with `A` the zero-mean vector potential of `B`.
pub fn magnetic_helicity(b: &VectorField) -> Result<f64> {
    Ok(vector_potential(b)?.dot(b).integrate())
}

/// `∫ α(B) μ`.
pub fn cross_helicity(alpha: &VectorField, b: &VectorField) -> Result<f64> {
    alpha.grid().ensure_same(b.grid())?;
    check_magnetic(b)?;
    Ok(alpha.dot(b).integrate())
}

/// `∫ α(B̃) ρ μ` where `B̃ = B/ρ` is the field whose contraction with the
/// density form `ρ μ` gives the flux form of `B`.
pub fn gen_cross_helicity(alpha: &VectorField, rho: &ScalarField, b: &VectorField) -> Result<f64> {
    alpha.grid().ensure_same(b.grid())?;
    alpha.grid().ensure_same(rho.grid())?;
    check_magnetic(b)?;
    check_positive(rho)?;
    let carried = b.map_components(|c| c.zip_map(rho, |x, r| x / r));
    Ok(alpha.dot(&carried).inner(rho))
}

fn check_positive(rho: &ScalarField) -> Result<()> {
    let min = rho.min();
    if min <= 0.0 {
        Err(Error::Positivity { min })
    } else {
        Ok(())
    }
}

/// `∫ h(ω/ρ) ρ μ` on a 2D grid. The kinked weight `|s|` is integrated on a
/// refined grid, where the quadrature error at zero crossings is smaller.
pub fn enstrophy_family(omega: &ScalarField, rho: &ScalarField, h: CasimirWeight) -> Result<f64> {
    omega.grid().require_dim(2)?;
    omega.grid().ensure_same(rho.grid())?;
    check_positive(rho)?;
    let integrand =
        |w: &ScalarField, r: &ScalarField| w.zip_map(r, |w, r| h.eval(w / r) * r).integrate();
    if h == CasimirWeight::Abs {
        let r = rho.refined(ABS_REFINEMENT)?;
        check_positive(&r)?;
        Ok(integrand(&omega.refined(ABS_REFINEMENT)?, &r))
    } else {
        Ok(integrand(omega, rho))
    }
}

/// A coadjoint element: a 1-form `α` (as a vector field), a density `ρ` and,
/// in 3D, a divergence-free field `B` representing a closed 2-form.
#[derive(Clone, Debug, PartialEq)]
pub struct CoadjointState {
    pub alpha: VectorField,
    pub rho: ScalarField,
    pub b: Option<VectorField>,
}

impl CoadjointState {
    pub fn new(alpha: VectorField, rho: ScalarField, b: Option<VectorField>) -> Result<Self> {
        alpha.grid().ensure_same(rho.grid())?;
        check_positive(&rho)?;
        if let Some(b) = &b {
            alpha.grid().ensure_same(b.grid())?;
            alpha.grid().require_dim(3)?;
        }
        Ok(Self { alpha, rho, b })
    }

    /// `curl α` of a planar state.
    pub fn vorticity_2d(&self) -> Result<ScalarField> {
        self.alpha.curl_2d()
    }
}

/// Group element acting on a [`CoadjointState`]: the time-`time` flow map
/// of a divergence-free `generator`, an exact shift `df`, and for states
/// with a magnetic field the shift `B × u` with `ρu = curl P`.
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub generator: VectorField,
    pub time: f64,
    pub exact: Option<ScalarField>,
    pub pressure: Option<VectorField>,
    /// RK4 substeps used to integrate particle paths.
    pub substeps: usize,
}

impl Perturbation {
    pub fn flow(generator: VectorField, time: f64) -> Self {
        Self {
            generator,
            time,
            exact: None,
            pressure: None,
            substeps: 8,
        }
    }
}

type Mat = [[f64; 3]; 3];

fn mat_mul(a: &Mat, b: &Mat, d: usize) -> Mat {
    let mut c = [[0.0; 3]; 3];
    for i in 0..d {
        for j in 0..d {
            c[i][j] = (0..d).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn det(a: &Mat, d: usize) -> f64 {
    match d {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
    }
}

struct PathIntegrator<'a> {
    sampler: &'a FieldSampler,
    dim: usize,
    buf: Vec<f64>,
}

impl PathIntegrator<'_> {
    /// Velocity and velocity gradient at `x`.
    fn eval(&mut self, x: &[f64; 3]) -> ([f64; 3], Mat) {
        let d = self.dim;
        self.sampler.sample(&x[..d], &mut self.buf);
        let mut w = [0.0; 3];
        let mut g = [[0.0; 3]; 3];
        for (a, row) in g.iter_mut().enumerate().take(d) {
            w[a] = self.buf[a];
            row[..d].copy_from_slice(&self.buf[d + a * d..d + (a + 1) * d]);
        }
        (w, g)
    }

    fn rhs(&mut self, x: &[f64; 3], j: &Mat) -> ([f64; 3], Mat) {
        let (w, g) = self.eval(x);
        (w, mat_mul(&g, j, self.dim))
    }

    /// RK4 of `ẋ = w(x)`, `J̇ = ∇w(x) J` from `(x0, I)`.
    fn flow(&mut self, x0: [f64; 3], time: f64, substeps: usize) -> ([f64; 3], Mat) {
        let d = self.dim;
        let mut x = x0;
        let mut j = [[0.0; 3]; 3];
        for (a, row) in j.iter_mut().enumerate().take(d) {
            row[a] = 1.0;
        }
        if time == 0.0 || substeps == 0 {
            return (x, j);
        }
        let h = time / substeps as f64;
        let shift = |x: &[f64; 3], j: &Mat, dx: &[f64; 3], dj: &Mat, s: f64| {
            let mut xn = *x;
            let mut jn = *j;
            for a in 0..d {
                xn[a] += s * dx[a];
                for b in 0..d {
                    jn[a][b] += s * dj[a][b];
                }
            }
            (xn, jn)
        };
        for _ in 0..substeps {
            let (kx1, kj1) = self.rhs(&x, &j);
            let (x2, j2) = shift(&x, &j, &kx1, &kj1, 0.5 * h);
            let (kx2, kj2) = self.rhs(&x2, &j2);
            let (x3, j3) = shift(&x, &j, &kx2, &kj2, 0.5 * h);
            let (kx3, kj3) = self.rhs(&x3, &j3);
            let (x4, j4) = shift(&x, &j, &kx3, &kj3, h);
            let (kx4, kj4) = self.rhs(&x4, &j4);
            for a in 0..d {
                x[a] += h / 6.0 * (kx1[a] + 2.0 * kx2[a] + 2.0 * kx3[a] + kx4[a]);
                for b in 0..d {
                    j[a][b] +=
                        h / 6.0 * (kj1[a][b] + 2.0 * kj2[a][b] + 2.0 * kj3[a][b] + kj4[a][b]);
                }
            }
        }
        (x, j)
    }
}

/// Applies a [`Perturbation`]: pulls `α`, `ρ μ` and the flux form of `B`
/// back by the flow map `φ` (`α ↦ Jᵀ α∘φ`, `ρ ↦ det J ρ∘φ`, and
/// `B ↦ curl(Jᵀ A∘φ)` for the vector potential `A` of `B`), then adds `df`
/// and `B × u` to `α`.
pub fn coadjoint_perturb(state: &CoadjointState, p: &Perturbation) -> Result<CoadjointState> {
    let grid = state.alpha.grid().clone();
    grid.ensure_same(p.generator.grid())?;
    let div = p.generator.divergence().norm_l2();
    if div > GENERATOR_TOLERANCE * scale_of(&p.generator) {
        return Err(Error::Constraint(format!(
            "generator has divergence {div:e}"
        )));
    }
    if p.pressure.is_some() && state.b.is_none() {
        return Err(Error::InvalidArgument(
            "a pressure shift needs a magnetic field".into(),
        ));
    }

    let still = p.time == 0.0
        || p.substeps == 0
        || p.generator.components().iter().all(|c| c.max_abs() == 0.0);
    let (mut alpha, rho, b) = if still {
        (state.alpha.clone(), state.rho.clone(), state.b.clone())
    } else {
        transport(state, p)?
    };

    if let Some(f) = &p.exact {
        grid.ensure_same(f.grid())?;
        alpha = &alpha + &f.gradient();
    }
    if let (Some(pp), Some(b)) = (&p.pressure, &b) {
        grid.ensure_same(pp.grid())?;
        let u = pp.curl()?.map_components(|c| c.zip_map(&rho, |x, r| x / r));
        alpha = &alpha + &b.cross(&u);
    }
    CoadjointState::new(alpha, rho, b)
}

/// Pulls `α`, `ρ` and `B` back along the flow of the generator.
fn transport(
    state: &CoadjointState,
    p: &Perturbation,
) -> Result<(VectorField, ScalarField, Option<VectorField>)> {
    let grid = state.alpha.grid().clone();
    let d = grid.dim();
    let mut flow_fields: Vec<ScalarField> = p.generator.components().to_vec();
    for a in 0..d {
        for b in 0..d {
            flow_fields.push(p.generator.component(a).d(b));
        }
    }
    let flow_refs: Vec<&ScalarField> = flow_fields.iter().collect();
    let flow_sampler = FieldSampler::new(&grid, &flow_refs);

    // `B` is carried through its vector potential so that the transported
    // field stays exactly solenoidal.
    let potential = state.b.as_ref().map(vector_potential).transpose()?;
    let mut state_refs: Vec<&ScalarField> = state.alpha.components().iter().collect();
    state_refs.push(&state.rho);
    if let Some(a) = &potential {
        state_refs.extend(a.components().iter());
    }
    let state_sampler = FieldSampler::new(&grid, &state_refs);

    let mut integrator = PathIntegrator {
        sampler: &flow_sampler,
        dim: d,
        buf: vec![0.0; d + d * d],
    };
    let n = grid.len();
    let mut alpha = vec![vec![0.0; n]; d];
    let mut rho = vec![0.0; n];
    let mut a_out = vec![vec![0.0; n]; if potential.is_some() { d } else { 0 }];
    let mut sampled = vec![0.0; state_refs.len()];
    for node in 0..n {
        let (x, j) = integrator.flow(grid.coords(node), p.time, p.substeps);
        state_sampler.sample(&x[..d], &mut sampled);
        let det_j = det(&j, d);
        for a in 0..d {
            alpha[a][node] = (0..d).map(|c| j[c][a] * sampled[c]).sum();
        }
        rho[node] = det_j * sampled[d];
        if potential.is_some() {
            let av = &sampled[d + 1..];
            for a in 0..d {
                a_out[a][node] = (0..d).map(|c| j[c][a] * av[c]).sum();
            }
        }
    }

    let field = |v: Vec<f64>| ScalarField::new(grid.clone(), v);
    let alpha = VectorField::from_components(alpha.into_iter().map(field).collect::<Result<_>>()?)?;
    let rho = field(rho)?;
    let b = if potential.is_some() {
        let a = VectorField::from_components(a_out.into_iter().map(field).collect::<Result<_>>()?)?;
        Some(a.curl()?)
    } else {
        None
    };
    Ok((alpha, rho, b))
}
