use num_complex::Complex64;

use super::functions::nu;
use crate::cloud::{cluster, ValueCloud};
use crate::linalg::vec_norm;
use crate::linalg::ComplexMatrix;
use crate::poly::{NumericPoly, PolyMap};
use crate::sampler::{gauss_newton, sample_rank_deficient, NewtonOptions, SamplerConfig};

/// Settings for sampling critical values.
#[derive(Clone, Debug)]
pub struct K0Options {
    /// number of multistart Newton runs
    pub budget: usize,
    pub seed: u64,
    /// critical points farther out than this are rejected: far-out
    /// near-solutions are asymptotic, not critical
    pub max_norm: f64,
    /// certification threshold on `ν / (1 + σ_max)`
    pub certify_tol: f64,
    pub cluster_tol: f64,
}

impl Default for K0Options {
    fn default() -> Self {
        Self { budget: 64, seed: 0, max_norm: 1e3, certify_tol: 1e-10, cluster_tol: 1e-6 }
    }
}

impl K0Options {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self { budget, seed, ..Self::default() }
    }
}

pub(crate) fn minor_system(f: &PolyMap) -> Vec<String> {
    let vars = f.var_names();
    let mut system: Vec<String> =
        f.jacobian_minor_polys().iter().map(|p| format!("{} = 0", p.to_string_with(&vars))).collect();
    if system.is_empty() {
        system.push("0 = 0".to_string());
    }
    system
}

/// Samples `K₀(F)`: multistart Newton on the rank-deficiency system of
/// `J(F)`, sliced by `m-1` random hyperplanes; certified points are mapped
/// through `F` and clustered. Each cloud residual is the certified
/// `ν(J(F)(x))` of the representative preimage.
pub fn k0_sample(f: &PolyMap, opts: &K0Options) -> ValueCloud {
    let cfg = SamplerConfig::new(opts.budget, opts.seed, 0);
    let minors = MinorSystem::new(f);
    let mut samples = Vec::new();
    for cp in sample_rank_deficient(f, &cfg) {
        let z = minors.polish(cp.z);
        if let Some((t, res)) = certify_critical(f, &z, opts) {
            samples.push((t, res, z));
        }
    }
    let mut cloud = ValueCloud::empty("K0", minor_system(f));
    cloud.push_samples(cluster(samples, opts.cluster_tol));
    cloud
}

/// The maximal minors of `J(F)` with their gradients.
struct MinorSystem {
    minors: Vec<NumericPoly>,
    grads: Vec<Vec<NumericPoly>>,
}

impl MinorSystem {
    fn new(f: &PolyMap) -> Self {
        let polys = f.jacobian_minor_polys();
        let grads = polys
            .iter()
            .map(|p| (0..f.nvars()).map(|i| p.partial(i).expect("index in range").to_numeric()).collect())
            .collect();
        Self { minors: polys.iter().map(|p| p.to_numeric()).collect(), grads }
    }

    /// Minimum-norm Gauss–Newton on `minors = 0` for as long as the residual
    /// drops. Singular critical loci (like `y = 0` for `y^2`) are reached
    /// only linearly by the Lagrange system, which leaves image errors well
    /// above the cluster tolerance.
    fn polish(&self, z: Vec<Complex64>) -> Vec<Complex64> {
        if self.minors.is_empty() {
            return z;
        }
        let opts = NewtonOptions { max_iter: 400, tol: 0.0, polish_iter: 0, ..NewtonOptions::default() };
        let system = |x: &[Complex64]| {
            let r: Vec<Complex64> = self.minors.iter().map(|p| p.eval(x)).collect();
            let mut jac = ComplexMatrix::zeros(r.len(), x.len());
            for (k, row) in self.grads.iter().enumerate() {
                for (i, g) in row.iter().enumerate() {
                    jac[(k, i)] = g.eval(x);
                }
            }
            (r, jac)
        };
        gauss_newton(system, z, &opts).x
    }
}

fn certify_critical(f: &PolyMap, z: &[Complex64], opts: &K0Options) -> Option<(Vec<Complex64>, f64)> {
    if !z.iter().all(|c| c.re.is_finite() && c.im.is_finite()) || vec_norm(z) > opts.max_norm {
        return None;
    }
    let jac = f.jacobian_unchecked(z);
    let svd = jac.svd();
    let smin = nu(&jac).ok()?;
    if smin >= opts.certify_tol * (1.0 + svd.max()) {
        return None;
    }
    Some((f.eval_exact_rounded(z)?, smin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbola_map_has_one_critical_value() {
        let f = PolyMap::parse(&["x*y - 1", "y^2*z"], &["x", "y", "z"]).unwrap();
        let cloud = k0_sample(&f, &K0Options::new(32, 1));
        assert_eq!(cloud.len(), 1, "{:?}", cloud.points);
        let t = &cloud.points[0];
        assert!((t[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-6);
        assert!(t[1].norm() < 1e-6);
    }

    #[test]
    fn linear_projection_has_no_critical_values() {
        let f = PolyMap::parse(&["x"], &["x", "y"]).unwrap();
        assert!(k0_sample(&f, &K0Options::new(16, 1)).is_empty());
    }

    #[test]
    fn quadric_critical_value_is_zero() {
        let f = PolyMap::parse(&["x^2 + y^2"], &["x", "y"]).unwrap();
        let cloud = k0_sample(&f, &K0Options::new(16, 2));
        assert_eq!(cloud.len(), 1);
        assert!(cloud.points[0][0].norm() < 1e-10);
    }

    #[test]
    fn broughton_polynomial_has_no_critical_values() {
        let f = PolyMap::parse(&["x + x^2*y"], &["x", "y"]).unwrap();
        assert!(k0_sample(&f, &K0Options::new(64, 3)).is_empty());
    }
}
