//! Fiber transport along target paths.
//!
//! Over a path `s ↦ w(s)` in the target, a fiber point moves with velocity
//! `v` solving `dF(x) v = w'(s)` and `⟨v, x⟩ = 0` (Hermitian). The second
//! condition keeps `‖x‖` constant, so the flow exists as long as
//! `[J(F)(x); x̄]` keeps rank `m + 1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotic::RANK_TOL;
use crate::linalg::{vec_norm, ComplexMatrix};
use crate::poly::PolyMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("stacked matrix [J(F)(x); conj(x)] has rank <= m")]
    RankDeficient,
    #[error("point has {got} coordinates, map has {expected} variables")]
    PointLength { expected: usize, got: usize },
    #[error("vector has {got} coordinates, map has {expected} components")]
    VectorLength { expected: usize, got: usize },
    #[error("path needs at least one waypoint")]
    EmptyPath,
    #[error("start is not on the fiber over the first waypoint (residual {0:e})")]
    StartOffFiber(f64),
    #[error("step and tolerance must be positive")]
    BadStep,
}

fn stacked(f: &PolyMap, x: &[Complex64]) -> ComplexMatrix {
    let mut a = f.jacobian_unchecked(x);
    let nx = vec_norm(x);
    let row: Vec<Complex64> = if nx > 0.0 { x.iter().map(|c| c.conj() / nx).collect() } else { x.to_vec() };
    a.push_row(&row);
    a
}

/// Minimum-norm `v` with `dF(x) v = w` and `⟨v, x⟩ = 0`.
pub fn lift_vector(f: &PolyMap, x: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>, TransportError> {
    if x.len() != f.nvars() {
        return Err(TransportError::PointLength { expected: f.nvars(), got: x.len() });
    }
    if w.len() != f.ncomponents() {
        return Err(TransportError::VectorLength { expected: f.ncomponents(), got: w.len() });
    }
    solve_stacked(f, x, w)
}

fn solve_stacked(f: &PolyMap, x: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>, TransportError> {
    let a = stacked(f, x);
    let svd = a.svd();
    if svd.min() < RANK_TOL * (svd.max() + 1.0) {
        return Err(TransportError::RankDeficient);
    }
    let mut rhs = w.to_vec();
    rhs.push(Complex64::new(0.0, 0.0));
    Ok(svd.solve(&rhs, 0.0))
}

#[derive(Clone, Debug)]
pub struct TransportTask {
    pub map: PolyMap,
    pub start: Vec<Complex64>,
    /// waypoints of a piecewise-linear path, traversed uniformly in `s ∈ [0, 1]`
    pub path: Vec<Vec<Complex64>>,
    /// initial step in `s`
    pub step: f64,
    /// fiber tolerance, also drives the local error control
    pub tol: f64,
}

impl TransportTask {
    pub fn new(map: PolyMap, start: Vec<Complex64>, path: Vec<Vec<Complex64>>) -> Self {
        Self { map, start, path, step: 1e-2, tol: 1e-8 }
    }

    fn validate(&self) -> Result<(), TransportError> {
        let f = &self.map;
        if self.start.len() != f.nvars() {
            return Err(TransportError::PointLength { expected: f.nvars(), got: self.start.len() });
        }
        let Some(first) = self.path.first() else { return Err(TransportError::EmptyPath) };
        if let Some(bad) = self.path.iter().find(|p| p.len() != f.ncomponents()) {
            return Err(TransportError::VectorLength { expected: f.ncomponents(), got: bad.len() });
        }
        if !(self.step > 0.0 && self.tol > 0.0) {
            return Err(TransportError::BadStep);
        }
        let res = fiber_residual(f, &self.start, first);
        if !(res <= self.tol) {
            return Err(TransportError::StartOffFiber(res));
        }
        Ok(())
    }

    fn segments(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    /// `w(s)` for `s` on the given segment.
    fn path_at(&self, s: f64, segment: usize) -> Vec<Complex64> {
        let k = self.segments();
        if k == 0 {
            return self.path[0].clone();
        }
        let local = s * k as f64 - segment as f64;
        let (a, b) = (&self.path[segment], &self.path[segment + 1]);
        a.iter().zip(b).map(|(p, q)| p + (q - p) * local).collect()
    }

    fn path_velocity(&self, segment: usize) -> Vec<Complex64> {
        let k = self.segments() as f64;
        let (a, b) = (&self.path[segment], &self.path[segment + 1]);
        a.iter().zip(b).map(|(p, q)| (q - p) * k).collect()
    }
}

fn fiber_residual(f: &PolyMap, x: &[Complex64], t: &[Complex64]) -> f64 {
    let fx = f.eval_unchecked(x);
    let d: Vec<Complex64> = fx.iter().zip(t).map(|(a, b)| a - b).collect();
    vec_norm(&d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TransportStatus {
    Ok,
    RankDeficient { s: f64 },
    StepUnderflow { s: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportSample {
    pub s: f64,
    pub x: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportTrace {
    pub status: TransportStatus,
    pub samples: Vec<TransportSample>,
    /// `max_s |‖x(s)‖ − ‖x(0)‖|`
    pub norm_drift: f64,
    /// `max_s ‖F(x(s)) − w(s)‖` over the samples
    pub fiber_residual_max: f64,
}

impl TransportTrace {
    pub fn end(&self) -> &[Complex64] {
        &self.samples.last().expect("trace starts with the start point").x
    }
}

pub const MIN_STEP: f64 = 1e-12;

// Dormand–Prince 5(4); the field is autonomous on a segment, so the nodes
// are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn axpy(x: &[Complex64], terms: &[(f64, &Vec<Complex64>)], h: f64) -> Vec<Complex64> {
    let mut out = x.to_vec();
    for (c, k) in terms {
        if *c != 0.0 {
            for (o, v) in out.iter_mut().zip(k.iter()) {
                *o += v * (c * h);
            }
        }
    }
    out
}

/// One embedded step; returns the 5th-order point and the error estimate.
fn dopri_step(
    f: &PolyMap,
    x: &[Complex64],
    h: f64,
    velocity: &[Complex64],
) -> Result<(Vec<Complex64>, f64), TransportError> {
    let mut ks: Vec<Vec<Complex64>> = Vec::with_capacity(7);
    for stage in 0..7 {
        let terms: Vec<(f64, &Vec<Complex64>)> = (0..stage).map(|j| (A[stage][j], &ks[j])).collect();
        let y = axpy(x, &terms, h);
        ks.push(solve_stacked(f, &y, velocity)?);
    }
    let t5: Vec<(f64, &Vec<Complex64>)> = B5.iter().zip(&ks).map(|(b, k)| (*b, k)).collect();
    let t4: Vec<(f64, &Vec<Complex64>)> = B4.iter().zip(&ks).map(|(b, k)| (*b, k)).collect();
    let y5 = axpy(x, &t5, h);
    let y4 = axpy(x, &t4, h);
    let diff: Vec<Complex64> = y5.iter().zip(&y4).map(|(a, b)| a - b).collect();
    Ok((y5, vec_norm(&diff)))
}

/// Transports `task.start` along the path. Failures along the way are
/// reported in the trace status; only malformed tasks are errors.
pub fn transport(task: &TransportTask) -> Result<TransportTrace, TransportError> {
    task.validate()?;
    let f = &task.map;
    let r0 = vec_norm(&task.start);
    let mut x = task.start.clone();
    let mut samples = vec![TransportSample { s: 0.0, x: x.clone() }];
    let mut residual_max = fiber_residual(f, &x, &task.path[0]);
    let local_tol = 1e-2 * task.tol;
    let k = task.segments();
    let mut status = TransportStatus::Ok;
    let mut h = task.step;
    'segments: for seg in 0..k {
        let velocity = task.path_velocity(seg);
        let s_end = (seg + 1) as f64 / k as f64;
        let mut s = seg as f64 / k as f64;
        while s < s_end {
            if h < MIN_STEP {
                status = TransportStatus::StepUnderflow { s };
                break 'segments;
            }
            let step = h.min(s_end - s);
            let (y, err) = match dopri_step(f, &x, step, &velocity) {
                Ok(v) => v,
                Err(_) => {
                    if solve_stacked(f, &x, &velocity).is_err() {
                        status = TransportStatus::RankDeficient { s };
                        break 'segments;
                    }
                    h = step / 4.0;
                    continue;
                }
            };
            let scale = 1.0 + vec_norm(&x);
            if !(err <= local_tol * scale) {
                h = step * (0.9 * (local_tol * scale / err).powf(0.2)).clamp(0.1, 0.5);
                continue;
            }
            let s_next = if step == s_end - s { s_end } else { s + step };
            let target = task.path_at(s_next, seg);
            // project back onto the fiber, tangentially to the sphere
            let mut y = y;
            let miss: Vec<Complex64> =
                target.iter().zip(f.eval_unchecked(&y)).map(|(t, v)| t - v).collect();
            match solve_stacked(f, &y, &miss) {
                Ok(d) => y.iter_mut().zip(&d).for_each(|(a, b)| *a += b),
                Err(_) => {
                    status = TransportStatus::RankDeficient { s: s_next };
                    break 'segments;
                }
            }
            let res = fiber_residual(f, &y, &target);
            if !(res <= task.tol) {
                h = step / 2.0;
                continue;
            }
            residual_max = residual_max.max(res);
            x = y;
            s = s_next;
            samples.push(TransportSample { s, x: x.clone() });
            let grow = if err == 0.0 { 5.0 } else { (0.9 * (local_tol * scale / err).powf(0.2)).clamp(0.2, 5.0) };
            h = step * grow;
        }
    }
    let norm_drift = samples.iter().map(|p| (vec_norm(&p.x) - r0).abs()).fold(0.0, f64::max);
    Ok(TransportTrace { status, samples, norm_drift, fiber_residual_max: residual_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn proj() -> PolyMap {
        PolyMap::parse(&["x"], &["x", "y"]).unwrap()
    }

    #[test]
    fn lift_examples() {
        let f = proj();
        let v = lift_vector(&f, &[c(0.0), c(1.0)], &[c(1.0)]).unwrap();
        assert!((v[0] - c(1.0)).norm() < 1e-14 && v[1].norm() < 1e-14);
        assert_eq!(lift_vector(&f, &[c(1.0), c(0.0)], &[c(1.0)]), Err(TransportError::RankDeficient));
        let z = lift_vector(&f, &[c(0.3), c(2.0)], &[c(0.0)]).unwrap();
        assert!(vec_norm(&z) < 1e-15);
    }

    #[test]
    fn closed_form_transport() {
        let task = TransportTask::new(proj(), vec![c(0.0), c(5.0)], vec![vec![c(0.0)], vec![c(0.3)]]);
        let trace = transport(&task).unwrap();
        assert_eq!(trace.status, TransportStatus::Ok);
        let end = trace.end();
        assert!((end[0] - c(0.3)).norm() < 1e-6);
        // y' = -s / y
        assert!((end[1].norm() - 24.91f64.sqrt()).abs() < 1e-6, "{end:?}");
        assert!(trace.norm_drift <= 1e-6 * 6.0);
        assert!(trace.fiber_residual_max <= task.tol);
    }

    #[test]
    fn constant_path_stays_put() {
        let start = vec![c(0.2), c(1.0)];
        let task = TransportTask::new(proj(), start.clone(), vec![vec![c(0.2)], vec![c(0.2)]]);
        let trace = transport(&task).unwrap();
        assert_eq!(trace.status, TransportStatus::Ok);
        assert!(vec_norm(&trace.end().iter().zip(&start).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-12);
    }

    #[test]
    fn hitting_the_equator_is_rank_deficient() {
        // on ‖x‖ = 1 the fiber x = 1 touches the sphere at (1, 0)
        let task = TransportTask::new(proj(), vec![c(0.0), c(1.0)], vec![vec![c(0.0)], vec![c(2.0)]]);
        let trace = transport(&task).unwrap();
        assert!(matches!(trace.status, TransportStatus::RankDeficient { .. } | TransportStatus::StepUnderflow { .. }));
    }

    #[test]
    fn loop_returns_to_start_fiber() {
        let f = PolyMap::parse(&["x*y + 1", "(x*y*z+1)*(x*y*z+z-1)"], &["x", "y", "z"]).unwrap();
        // x y = 4 and 20 z^2 + z - 6 = 0 put the start over (5, 5)
        let z = (-1.0 + 481f64.sqrt()) / 40.0;
        let start = vec![c(4.0), c(1.0), c(z)];
        let w = |a: f64, b: f64| vec![c(a), c(b)];
        let path = vec![w(5.0, 5.0), w(5.5, 5.0), w(5.0, 5.5), w(4.5, 5.0), w(5.0, 4.5), w(5.5, 5.0), w(5.0, 5.0)];
        let task = TransportTask::new(f.clone(), start, path);
        let trace = transport(&task).unwrap();
        assert_eq!(trace.status, TransportStatus::Ok);
        assert!(fiber_residual(&f, trace.end(), &w(5.0, 5.0)) < 1e-5);
        assert!(trace.norm_drift <= 1e-6 * (1.0 + vec_norm(&task.start)));
    }

    #[test]
    fn malformed_tasks() {
        let f = proj();
        let off = TransportTask::new(f.clone(), vec![c(1.0), c(1.0)], vec![vec![c(0.0)]]);
        assert!(matches!(transport(&off), Err(TransportError::StartOffFiber(_))));
        let empty = TransportTask::new(f, vec![c(0.0), c(1.0)], vec![]);
        assert_eq!(transport(&empty).unwrap_err(), TransportError::EmptyPath);
    }
}
