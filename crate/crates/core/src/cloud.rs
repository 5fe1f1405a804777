//! Finite samples of value sets in `C^m`.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::vec_norm;

/// A sampled value set with the residual of each sample and the polynomial
/// system that generated it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueCloud {
    pub label: String,
    pub points: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    /// one source point per value, mapped to it by the generating map
    pub preimages: Vec<Vec<Complex64>>,
    /// generating equations, one per entry, in text form
    pub system: Vec<String>,
}

impl ValueCloud {
    pub fn empty(label: impl Into<String>, system: Vec<String>) -> Self {
        Self { label: label.into(), points: Vec::new(), residuals: Vec::new(), preimages: Vec::new(), system }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Merges `other` into `self` and re-clusters.
    pub fn absorb(&mut self, other: ValueCloud, tol: f64) {
        let mut samples = self.take_samples();
        let mut other = other;
        samples.extend(other.take_samples());
        self.push_samples(cluster(samples, tol));
        self.system.extend(other.system);
    }

    fn take_samples(&mut self) -> Vec<Sample> {
        let pts = self.points.drain(..);
        let res = self.residuals.drain(..);
        let pre = self.preimages.drain(..);
        pts.zip(res).zip(pre).map(|((t, r), x)| (t, r, x)).collect()
    }

    pub(crate) fn push_samples(&mut self, samples: Vec<Sample>) {
        for (t, r, x) in samples {
            self.points.push(t);
            self.residuals.push(r);
            self.preimages.push(x);
        }
    }

    /// Distance from `t` to the nearest cloud point.
    pub fn distance_to(&self, t: &[Complex64]) -> Option<f64> {
        self.points.iter().map(|p| distance(p, t)).min_by(f64::total_cmp)
    }
}

pub(crate) fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    vec_norm(&d)
}

/// A value, its residual and its preimage.
pub(crate) type Sample = (Vec<Complex64>, f64, Vec<Complex64>);

/// Greedy clustering: samples are visited in the given order and join the
/// first cluster whose representative lies within `tol`. The representative
/// is the member with the smallest residual. Clusters come back sorted by
/// coordinates.
pub(crate) fn cluster<T>(samples: Vec<(Vec<Complex64>, f64, T)>, tol: f64) -> Vec<(Vec<Complex64>, f64, T)> {
    let mut reps: Vec<((Vec<Complex64>, f64, T), Vec<Complex64>)> = Vec::new();
    for (p, res, payload) in samples {
        match reps.iter_mut().find(|(_, anchor)| distance(anchor, &p) <= tol) {
            Some((best, _)) => {
                if res < best.1 {
                    *best = (p, res, payload);
                }
            }
            None => reps.push(((p.clone(), res, payload), p)),
        }
    }
    let mut out: Vec<_> = reps.into_iter().map(|(best, _)| best).collect();
    out.sort_by(|a, b| compare_points(&a.0, &b.0));
    out
}

pub(crate) fn compare_points(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}
