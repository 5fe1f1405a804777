//! Multistart Gauss–Newton sampling of rank-deficiency loci.
//!
//! A point `z` has `rank J(G)(z) < m` iff some `λ ≠ 0` satisfies
//! `λᵀ J(G)(z) = 0`. The sampler solves the square holomorphic system
//!
//! ```text
//! Σ_j λ_j ∂G_j/∂z_i (z) = 0      i = 1..n
//! c · λ = 1
//! h_k · z = h_k · z_start         k = 1..m-1
//! ```
//!
//! from random starts. Steps are minimum-norm least-squares steps, so the
//! iteration also converges onto positive-dimensional solution sets.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{vec_norm, ComplexMatrix};
use crate::poly::{NumericPoly, PolyMap};

/// Derives an independent RNG for one `(seed, stream, index)` triple so that
/// results do not depend on scheduling.
pub(crate) fn derived_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for v in [stream, index] {
        h = splitmix(h ^ splitmix(v));
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Complex number with log-uniform modulus in `[lo, hi]` and uniform phase.
pub(crate) fn log_uniform_complex(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = 10f64.powf(rng.gen_range(lo.log10()..hi.log10()));
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub(crate) fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box–Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::from_polar(r / std::f64::consts::SQRT_2, u2)
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// convergence when `‖r‖ ≤ tol · (1 + ‖u‖)`
    pub tol: f64,
    pub rcond: f64,
    /// abandon runs whose iterate exceeds this norm
    pub divergence_norm: f64,
    /// extra iterations after convergence while the residual keeps
    /// dropping; singular roots converge only linearly
    pub polish_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { max_iter: 100, tol: 1e-14, rcond: 1e-13, divergence_norm: 1e8, polish_iter: 60 }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x: Vec<Complex64>,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Damped Gauss–Newton with minimum-norm steps for a holomorphic system
/// given as `x ↦ (residual, Jacobian)`.
pub fn gauss_newton<S>(system: S, x0: Vec<Complex64>, opts: &NewtonOptions) -> NewtonOutcome
where
    S: Fn(&[Complex64]) -> (Vec<Complex64>, ComplexMatrix),
{
    let mut x = x0;
    let (mut r, mut jac) = system(&x);
    let mut rn = vec_norm(&r);
    let mut polished = 0;
    let mut iterations = 0;
    let done = |rn: f64, x: &[Complex64]| rn <= opts.tol * (1.0 + vec_norm(x));
    while iterations < opts.max_iter + opts.polish_iter {
        if done(rn, &x) {
            if polished >= opts.polish_iter || rn == 0.0 {
                break;
            }
            polished += 1;
        } else if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        let step = jac.solve_min_norm(&r, opts.rcond);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-6 {
            let trial: Vec<Complex64> = x.iter().zip(&step).map(|(a, b)| a - b * t).collect();
            let (tr, tj) = system(&trial);
            let tn = vec_norm(&tr);
            if tn.is_finite() && tn < rn {
                x = trial;
                r = tr;
                jac = tj;
                rn = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || vec_norm(&x) > opts.divergence_norm {
            break;
        }
    }
    let converged = done(rn, &x);
    NewtonOutcome { x, residual: rn, converged, iterations }
}

/// First and second derivatives of a map, ready for the Lagrange system.
pub(crate) struct CriticalSystem {
    n: usize,
    m: usize,
    grads: Vec<Vec<NumericPoly>>,
    hess: Vec<Vec<Vec<NumericPoly>>>,
}

impl CriticalSystem {
    pub(crate) fn new(map: &PolyMap) -> Self {
        let n = map.nvars();
        let jac = map.jacobian_polys();
        let grads = jac.iter().map(|row| row.iter().map(|p| p.to_numeric()).collect()).collect();
        let hess = jac
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| (0..n).map(|l| p.partial(l).expect("index in range").to_numeric()).collect())
                    .collect()
            })
            .collect();
        Self { n, m: map.ncomponents(), grads, hess }
    }

    fn residual_and_jacobian(
        &self,
        u: &[Complex64],
        normal: &[Complex64],
        slices: &[(Vec<Complex64>, Complex64)],
    ) -> (Vec<Complex64>, ComplexMatrix) {
        let (n, m) = (self.n, self.m);
        let (z, lambda) = u.split_at(n);
        let neq = n + 1 + slices.len();
        let mut r = Vec::with_capacity(neq);
        let mut jac = ComplexMatrix::zeros(neq, n + m);
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let g = self.grads[j][i].eval(z);
                acc += lambda[j] * g;
                jac[(i, n + j)] = g;
                for l in 0..n {
                    jac[(i, l)] += lambda[j] * self.hess[j][i][l].eval(z);
                }
            }
            r.push(acc);
        }
        let cl: Complex64 = normal.iter().zip(lambda).map(|(c, l)| c * l).sum();
        r.push(cl - 1.0);
        for (j, c) in normal.iter().enumerate() {
            jac[(n, n + j)] = *c;
        }
        for (k, (h, b)) in slices.iter().enumerate() {
            let v: Complex64 = h.iter().zip(z).map(|(a, x)| a * x).sum();
            r.push(v - b);
            for (l, a) in h.iter().enumerate() {
                jac[(n + 1 + k, l)] = *a;
            }
        }
        (r, jac)
    }
}

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub starts: usize,
    pub seed: u64,
    /// distinguishes independent sampling problems sharing a seed
    pub stream: u64,
    /// start moduli are log-uniform in this range
    pub modulus_range: (f64, f64),
    pub newton: NewtonOptions,
}

impl SamplerConfig {
    pub fn new(starts: usize, seed: u64, stream: u64) -> Self {
        Self { starts, seed, stream, modulus_range: (1e-2, 1e2), newton: NewtonOptions::default() }
    }
}

/// A converged solution of the Lagrange system.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub z: Vec<Complex64>,
    pub lambda: Vec<Complex64>,
    pub residual: f64,
    pub start_index: usize,
}

/// Runs every start (in parallel) and returns converged solutions ordered by
/// start index.
pub(crate) fn sample_rank_deficient(map: &PolyMap, cfg: &SamplerConfig) -> Vec<CriticalPoint> {
    let system = CriticalSystem::new(map);
    let (n, m) = (map.nvars(), map.ncomponents());
    (0..cfg.starts)
        .into_par_iter()
        .filter_map(|k| {
            let mut rng = derived_rng(cfg.seed, cfg.stream, k as u64);
            let (lo, hi) = cfg.modulus_range;
            let z0: Vec<Complex64> = (0..n).map(|_| log_uniform_complex(&mut rng, lo, hi)).collect();
            let normal: Vec<Complex64> = (0..m).map(|_| gaussian_complex(&mut rng)).collect();
            let nn: f64 = normal.iter().map(Complex64::norm_sqr).sum();
            let lambda0: Vec<Complex64> = normal.iter().map(|c| c.conj() / nn).collect();
            let slices: Vec<(Vec<Complex64>, Complex64)> = (0..m.saturating_sub(1))
                .map(|_| {
                    let h: Vec<Complex64> = (0..n).map(|_| gaussian_complex(&mut rng)).collect();
                    let b = h.iter().zip(&z0).map(|(a, x)| a * x).sum();
                    (h, b)
                })
                .collect();
            let mut u0 = z0;
            u0.extend(lambda0);
            let out = gauss_newton(|u| system.residual_and_jacobian(u, &normal, &slices), u0, &cfg.newton);
            if !out.converged {
                return None;
            }
            let (z, lambda) = out.x.split_at(n);
            Some(CriticalPoint { z: z.to_vec(), lambda: lambda.to_vec(), residual: out.residual, start_index: k })
        })
        .collect()
}
