use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::tuples::{face_tuples_at_infinity, FaceTuple, GammaInfReading};
use crate::latgeom::Face;
use crate::linalg::{minors, ComplexMatrix};
use crate::poly::{PolyMap, SparsePoly};
use crate::sampler::{derived_rng, log_uniform_complex, sample_rank_deficient, SamplerConfig};

/// Below this modulus a coordinate counts as zero (off the torus).
pub(crate) const TORUS_MIN_MODULUS: f64 = 1e-8;
pub(crate) const CERTIFY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    Degenerate,
    PresumedNondegenerate,
}

/// A torus point where the face Jacobian drops rank.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub point: Vec<Complex64>,
    /// largest of the maximal minors' moduli and the scaled rank residual
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyVerdict {
    pub status: VerdictStatus,
    pub certificate: Option<Certificate>,
    pub tuple: FaceTuple,
    pub budget_used: usize,
}

#[derive(Clone, Debug)]
pub struct NondegOptions {
    /// Newton starts per tuple
    pub budget: usize,
    pub seed: u64,
    pub reading: GammaInfReading,
}

impl NondegOptions {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self { budget, seed, reading: GammaInfReading::default() }
    }
}

/// The face-restricted map `((F_1)_{Δ_1}, …, (F_m)_{Δ_m})`.
pub(crate) fn face_map(f: &PolyMap, faces: &[Face]) -> PolyMap {
    let comps: Vec<SparsePoly> = f
        .components()
        .iter()
        .zip(faces)
        .map(|(c, face)| c.face_restriction(face).expect("faces come from the component's polytope"))
        .collect();
    PolyMap::new(comps).expect("same shape as the original map").with_names(&f.var_names())
}

fn sum_of_term_moduli(p: &SparsePoly, z: &[Complex64]) -> f64 {
    p.terms()
        .iter()
        .map(|(e, c)| {
            e.0.iter().zip(z).fold(c.to_complex().norm(), |acc, (&k, x)| acc * x.norm().powi(k as i32))
        })
        .sum()
}

/// Certifies rank deficiency of the face map at a torus point.
///
/// Besides small maximal minors this demands a small smallest singular
/// value of the matrix `z_i ∂G_j/∂z_i`, row `j` divided by the sum of the
/// term moduli of `G_j`. That matrix has the same rank as `J(G)(z)` but is
/// invariant under the torus action, so points that merely drift towards
/// a coordinate hyperplane (where raw minors shrink) are rejected.
pub(crate) fn certify_torus(g: &PolyMap, z: &[Complex64]) -> Option<f64> {
    if !z.iter().all(|c| c.re.is_finite() && c.im.is_finite() && c.norm() > TORUS_MIN_MODULUS) {
        return None;
    }
    let jac = g.jacobian_unchecked(z);
    let raw = minors(&jac, jac.rows()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if raw >= CERTIFY_TOL {
        return None;
    }
    let scaled = ComplexMatrix::from_fn(jac.rows(), jac.cols(), |j, i| {
        let s = sum_of_term_moduli(&g.components()[j], z);
        if s > 0.0 {
            jac[(j, i)] * z[i] / s
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let toric = scaled.svd().min();
    if toric >= CERTIFY_TOL {
        return None;
    }
    Some(raw.max(toric))
}

/// Whether some component has identically vanishing gradient, which makes
/// the face Jacobian rank-deficient at every point.
pub(crate) fn has_constant_component(g: &PolyMap) -> bool {
    g.components().iter().any(|c| c.degree() == 0)
}

/// Torus points of rank deficiency of `g`, in start order.
pub(crate) fn torus_samples(g: &PolyMap, budget: usize, seed: u64, stream: u64) -> Vec<(Vec<Complex64>, f64)> {
    if has_constant_component(g) {
        // every torus point qualifies
        let mut rng = derived_rng(seed, stream, 0);
        let (lo, hi) = SamplerConfig::new(0, 0, 0).modulus_range;
        return (0..budget.max(1))
            .map(|_| ((0..g.nvars()).map(|_| log_uniform_complex(&mut rng, lo, hi)).collect(), 0.0))
            .collect();
    }
    let cfg = SamplerConfig::new(budget, seed, stream);
    sample_rank_deficient(g, &cfg).into_iter().filter_map(|cp| certify_torus(g, &cp.z).map(|r| (cp.z, r))).collect()
}

/// One verdict per tuple of `Γ_∞(F)`. A tuple is `DEGENERATE` only with a
/// certified torus witness; otherwise it is presumed non-degenerate after
/// `budget` Newton starts.
pub fn check_nondegenerate(f: &PolyMap, opts: &NondegOptions) -> Vec<DegeneracyVerdict> {
    let tuples = face_tuples_at_infinity(f, opts.reading);
    tuples
        .into_par_iter()
        .enumerate()
        .map(|(k, tuple)| {
            let g = face_map(f, &tuple.faces);
            let certificate = if has_constant_component(&g) {
                Some(Certificate { point: vec![Complex64::new(1.0, 0.0); f.nvars()], residual: 0.0 })
            } else {
                torus_samples(&g, opts.budget, opts.seed, 1 + k as u64)
                    .into_iter()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(point, residual)| Certificate { point, residual })
            };
            let status = if certificate.is_some() { VerdictStatus::Degenerate } else { VerdictStatus::PresumedNondegenerate };
            DegeneracyVerdict { status, certificate, tuple, budget_used: opts.budget }
        })
        .collect()
}
