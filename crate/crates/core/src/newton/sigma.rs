use rayon::prelude::*;
use serde::Serialize;

use super::bad::bad_faces;
use super::torus::{face_map, torus_samples};
use crate::asymptotic::{k0_sample, K0Options};
use crate::cloud::{cluster, ValueCloud};
use crate::latgeom::Face;
use crate::poly::PolyMap;
use crate::scalar::GaussRational;

const SIGMA_INF_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug)]
pub struct SigmaOptions {
    /// Newton starts per sampling problem
    pub budget: usize,
    pub seed: u64,
    pub cluster_tol: f64,
}

impl SigmaOptions {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self { budget, seed, cluster_tol: 1e-6 }
    }
}

/// The coordinate hyperplane `t_index = constant` (1-based index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub index: usize,
    pub constant: GaussRational,
}

impl Serialize for Hyperplane {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Hyperplane", 2)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("constant", &self.constant.to_string())?;
        st.end()
    }
}

/// `Σ(F) = K₀(F) ∪ Σ_∞(F) ∪ ⋃ {t_i = F_i(0)}` as samples plus hyperplanes.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub k0: ValueCloud,
    pub sigma_inf: ValueCloud,
    pub hyperplanes: Vec<Hyperplane>,
}

/// Samples `Σ_∞(F)`: for each tuple of bad faces, torus points where the
/// face Jacobian drops rank, mapped through the face map. The cloud's
/// preimages are those torus points.
pub fn sigma_infinity(f: &PolyMap, opts: &SigmaOptions) -> ValueCloud {
    let bad: Vec<Vec<Face>> = f.components().iter().map(bad_faces).collect();
    let tuples = cartesian(&bad);
    let vars = f.var_names();
    let per_tuple: Vec<(Vec<String>, Vec<_>)> = tuples
        .into_par_iter()
        .enumerate()
        .map(|(k, faces)| {
            let g = face_map(f, &faces);
            let mut system: Vec<String> =
                g.jacobian_minor_polys().iter().map(|p| format!("{} = 0", p.to_string_with(&vars))).collect();
            if system.is_empty() {
                system.push("0 = 0".to_string());
            }
            let samples = torus_samples(&g, opts.budget, opts.seed, SIGMA_INF_STREAM + k as u64)
                .into_iter()
                .filter_map(|(z, r)| Some((g.eval_exact_rounded(&z)?, r, z)))
                .collect();
            (system, samples)
        })
        .collect();
    let mut cloud = ValueCloud::empty("Sigma_inf", Vec::new());
    let mut samples = Vec::new();
    for (system, s) in per_tuple {
        cloud.system.extend(system);
        samples.extend(s);
    }
    cloud.push_samples(cluster(samples, opts.cluster_tol));
    cloud
}

fn cartesian(lists: &[Vec<Face>]) -> Vec<Vec<Face>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.iter()
            .flat_map(|prefix| {
                list.iter().map(move |f| {
                    let mut t = prefix.clone();
                    t.push(f.clone());
                    t
                })
            })
            .collect()
    })
}

/// Assembles `Σ(F)`.
pub fn sigma(f: &PolyMap, opts: &SigmaOptions) -> SigmaReport {
    let k0 = k0_sample(f, &K0Options { cluster_tol: opts.cluster_tol, ..K0Options::new(opts.budget, opts.seed) });
    let sigma_inf = sigma_infinity(f, opts);
    let hyperplanes = f
        .value_at_origin()
        .into_iter()
        .enumerate()
        .map(|(i, constant)| Hyperplane { index: i + 1, constant })
        .collect();
    SigmaReport { k0, sigma_inf, hyperplanes }
}
