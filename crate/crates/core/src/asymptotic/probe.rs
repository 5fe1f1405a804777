//! Radius-scheduled searches for asymptotic critical values (`K_∞`) and
//! M-tameness failures (`M_∞`).
//!
//! Each *track* is followed through the increasing radii: its start at the
//! first radius is random (or a seed curve), and at every later radius it
//! restarts from the previous minimizer scaled onto the new sphere. A track
//! supports a candidate value `t` when its objective decays over the last
//! radii and its images stay put.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::functions::{gaffney, mtame_deficiency};
use super::optimize::{bfgs, BfgsOptions};
use crate::cloud::{compare_points, distance};
use crate::linalg::{vec_norm, ComplexMatrix};
use crate::poly::{NumericPoly, PolyMap};
use crate::sampler::{derived_rng, gauss_newton, gaussian_complex, NewtonOptions};

const PROBE_STREAM: u64 = 2 << 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbeError {
    #[error("radius schedule is empty")]
    EmptyRadii,
    #[error("radii must be positive and strictly increasing")]
    BadRadii,
    #[error("at least one restart per radius is required")]
    NoRestarts,
    #[error("seed curve has {got} coordinates, map has {expected} variables")]
    SeedCurveLength { expected: usize, got: usize },
    #[error("target has {got} coordinates, map has {expected} components")]
    TargetLength { expected: usize, got: usize },
    #[error("bad seed curve `{0}`: expected comma-separated coeff:exponent pairs")]
    SeedCurveSyntax(String),
}

/// The curve `x_i(R) = c_i · R^{e_i}` used to seed a track.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedCurve {
    pub coeffs: Vec<Complex64>,
    pub exponents: Vec<f64>,
}

impl SeedCurve {
    pub fn new(coeffs: Vec<Complex64>, exponents: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), exponents.len(), "one exponent per coefficient");
        Self { coeffs, exponents }
    }

    pub fn point(&self, radius: f64) -> Vec<Complex64> {
        self.coeffs.iter().zip(&self.exponents).map(|(c, e)| c * radius.powf(*e)).collect()
    }
}

impl std::str::FromStr for SeedCurve {
    type Err = ProbeError;

    /// `"1:1,1:-1,0:0"` is the curve `(R, 1/R, 0)`.
    fn from_str(s: &str) -> Result<Self, ProbeError> {
        let err = || ProbeError::SeedCurveSyntax(s.to_string());
        let mut coeffs = Vec::new();
        let mut exponents = Vec::new();
        for part in s.split(',') {
            let (c, e) = part.trim().split_once(':').ok_or_else(err)?;
            coeffs.push(Complex64::new(c.trim().parse().map_err(|_| err())?, 0.0));
            exponents.push(e.trim().parse().map_err(|_| err())?);
        }
        Ok(Self { coeffs, exponents })
    }
}

/// Radii, restarts and the candidate decision rule.
#[derive(Clone, Debug)]
pub struct ProbeSchedule {
    /// strictly increasing
    pub radii: Vec<f64>,
    /// random tracks, in addition to one track per seed curve
    pub restarts: usize,
    /// image clustering tolerance, also the distance allowed to a target
    pub tolerance: f64,
    pub seed: u64,
    /// required objective ratio between consecutive radii
    pub decay_factor: f64,
    /// number of trailing radii inspected
    pub decay_window: usize,
    /// objectives at or below this count as vanished
    pub floor: f64,
    pub seed_curves: Vec<SeedCurve>,
    pub target_weight: f64,
}

impl Default for ProbeSchedule {
    fn default() -> Self {
        Self {
            radii: (0..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect(),
            restarts: 8,
            tolerance: 1e-3,
            seed: 0,
            decay_factor: 2.0,
            decay_window: 4,
            floor: 1e-10,
            seed_curves: Vec::new(),
            target_weight: 1.0,
        }
    }
}

impl ProbeSchedule {
    pub fn validate(&self, f: &PolyMap, target: Option<&[Complex64]>) -> Result<(), ProbeError> {
        if self.radii.is_empty() {
            return Err(ProbeError::EmptyRadii);
        }
        if self.radii[0] <= 0.0 || !self.radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(ProbeError::BadRadii);
        }
        if self.restarts == 0 {
            return Err(ProbeError::NoRestarts);
        }
        for c in &self.seed_curves {
            if c.coeffs.len() != f.nvars() {
                return Err(ProbeError::SeedCurveLength { expected: f.nvars(), got: c.coeffs.len() });
            }
        }
        if let Some(t) = target {
            if t.len() != f.ncomponents() {
                return Err(ProbeError::TargetLength { expected: f.ncomponents(), got: t.len() });
            }
        }
        Ok(())
    }
}

/// Best point found on one sphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub radius: f64,
    pub track: usize,
    #[serde(rename = "x")]
    pub minimizer: Vec<Complex64>,
    pub objective: f64,
    /// `‖x‖ · g(dF(x))` at the minimizer (`K_∞` probes only)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaffney_objective: Option<f64>,
    pub image: Vec<Complex64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackEvidence {
    pub track: usize,
    /// objectives over the trailing window, by increasing radius
    pub objectives: Vec<f64>,
    /// consecutive ratios `objective(R_{k-1}) / objective(R_k)`
    pub ratios: Vec<f64>,
    /// largest distance of a window image from the last one
    pub image_spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub t: Vec<Complex64>,
    pub evidence: Vec<TrackEvidence>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub records: Vec<ProbeRecord>,
    pub candidates: Vec<Candidate>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Kinf,
    Mtame,
}

/// Searches for `t` with `x → ∞`, `F(x) → t`, `‖x‖ · ν(dF(x)) → 0`.
pub fn kinf_probe(
    f: &PolyMap,
    schedule: &ProbeSchedule,
    target: Option<&[Complex64]>,
) -> Result<ProbeReport, ProbeError> {
    probe(f, schedule, target, Kind::Kinf)
}

/// Searches for `t` with `x → ∞`, `F(x) → t`, `rank [J(F)(x); x̄] ≤ m`.
pub fn mtame_probe(
    f: &PolyMap,
    schedule: &ProbeSchedule,
    target: Option<&[Complex64]>,
) -> Result<ProbeReport, ProbeError> {
    probe(f, schedule, target, Kind::Mtame)
}

fn probe(
    f: &PolyMap,
    schedule: &ProbeSchedule,
    target: Option<&[Complex64]>,
    kind: Kind,
) -> Result<ProbeReport, ProbeError> {
    schedule.validate(f, target)?;
    let ntracks = schedule.seed_curves.len() + schedule.restarts;
    let system = (kind == Kind::Mtame).then(|| MtameSystem::new(f));
    let tracks: Vec<Vec<ProbeRecord>> = (0..ntracks)
        .into_par_iter()
        .map(|track| run_track(f, schedule, target, kind, system.as_ref(), track))
        .collect();
    let candidates = candidates(&tracks, schedule, target);
    let mut records: Vec<ProbeRecord> = tracks.into_iter().flatten().collect();
    records.sort_by(|a, b| a.radius.total_cmp(&b.radius).then(a.track.cmp(&b.track)));
    Ok(ProbeReport { records, candidates })
}

fn scale_to(x: &[Complex64], radius: f64) -> Vec<Complex64> {
    let n = vec_norm(x);
    if n == 0.0 {
        return x.to_vec();
    }
    x.iter().map(|c| c * (radius / n)).collect()
}

fn run_track(
    f: &PolyMap,
    schedule: &ProbeSchedule,
    target: Option<&[Complex64]>,
    kind: Kind,
    system: Option<&MtameSystem>,
    track: usize,
) -> Vec<ProbeRecord> {
    let n = f.nvars();
    let m = f.ncomponents();
    let mut rng = derived_rng(schedule.seed, PROBE_STREAM + track as u64, 0);
    let seed_curve = schedule.seed_curves.get(track);
    let normal: Vec<Complex64> = (0..=m).map(|_| gaussian_complex(&mut rng)).collect();
    let random_start: Vec<Complex64> = (0..n).map(|_| gaussian_complex(&mut rng)).collect();
    let mut prev: Option<(f64, Vec<Complex64>, Vec<Complex64>)> = None;
    let mut out = Vec::with_capacity(schedule.radii.len());
    for &radius in &schedule.radii {
        let (start, kappa) = match (&prev, seed_curve) {
            (_, Some(curve)) => (curve.point(radius), prev.as_ref().map(|p| p.2.clone())),
            (Some((r0, x, k)), None) => (x.iter().map(|c| c * (radius / r0)).collect(), Some(k.clone())),
            (None, None) => (scale_to(&random_start, radius), None),
        };
        let (record, kappa) = match kind {
            Kind::Kinf => (kinf_step(f, radius, &start, target, schedule.target_weight, track), Vec::new()),
            Kind::Mtame => mtame_step(
                f,
                system.expect("system built for M-tameness probes"),
                radius,
                &start,
                kappa,
                &normal,
                target,
                schedule.target_weight,
                track,
            ),
        };
        prev = Some((radius, record.minimizer.clone(), kappa));
        out.push(record);
    }
    out
}


fn kinf_objective(f: &PolyMap, radius: f64, x: &[Complex64]) -> (f64, f64) {
    let jac = f.jacobian_unchecked(x);
    let nu = jac.svd().min();
    let g = gaffney(&jac).unwrap_or(f64::NAN);
    (radius * nu, radius * g)
}

fn kinf_step(
    f: &PolyMap,
    radius: f64,
    start: &[Complex64],
    target: Option<&[Complex64]>,
    weight: f64,
    track: usize,
) -> ProbeRecord {
    const MU: f64 = 1e3;
    let penalized = |x: &[Complex64]| -> f64 {
        let nx = vec_norm(x);
        if nx == 0.0 || !nx.is_finite() {
            return f64::INFINITY;
        }
        let xh = scale_to(x, radius);
        let (obj, _) = kinf_objective(f, radius, &xh);
        let mut v = obj * obj + MU * (nx / radius - 1.0).powi(2);
        if let Some(t) = target {
            let img = f.eval_unchecked(&xh);
            v += weight * distance(&img, t).powi(2);
        }
        v
    };
    let mut best = scale_to(start, radius);
    let mut best_val = penalized(&best);
    let mut converged = false;
    for _round in 0..3 {
        let base = best.clone();
        let scales: Vec<f64> = base.iter().map(|c| c.norm().max(1e-12 * radius).max(f64::MIN_POSITIVE)).collect();
        let lift = |d: &[f64]| -> Vec<Complex64> {
            base.iter()
                .zip(&scales)
                .enumerate()
                .map(|(i, (b, s))| b + Complex64::new(d[2 * i], d[2 * i + 1]) * s)
                .collect()
        };
        let res = bfgs(|d| penalized(&lift(d)), vec![0.0; 2 * base.len()], &BfgsOptions::default());
        converged = res.converged;
        if res.fx < best_val {
            best = scale_to(&lift(&res.x), radius);
            best_val = penalized(&best);
        } else {
            break;
        }
    }
    let (objective, g) = kinf_objective(f, radius, &best);
    ProbeRecord {
        radius,
        track,
        image: f.eval_unchecked(&best),
        minimizer: best,
        objective,
        gaffney_objective: Some(g),
        converged,
    }
}

/// Row dependency `Σ λ_j ∂F_j(p) + μ p̄ / R = 0` of the stacked matrix,
/// normalized by `c · (λ, μ) = 1`, on the sphere `‖p‖ = R`, optionally with
/// `w (F(p) − t) = 0`. Solved in real coordinates
/// `(Re p, Im p, Re κ, Im κ)` with `κ = (λ, μ)`.
struct MtameSystem {
    n: usize,
    m: usize,
    values: Vec<NumericPoly>,
    grads: Vec<Vec<NumericPoly>>,
    hess: Vec<Vec<Vec<NumericPoly>>>,
}

impl MtameSystem {
    fn new(f: &PolyMap) -> Self {
        let jac = f.jacobian_polys();
        let n = f.nvars();
        let grads = jac.iter().map(|row| row.iter().map(|p| p.to_numeric()).collect()).collect();
        let hess = jac
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| (0..n).map(|l| p.partial(l).expect("index in range").to_numeric()).collect())
                    .collect()
            })
            .collect();
        let values = f.components().iter().map(|c| c.to_numeric()).collect();
        Self { n, m: f.ncomponents(), values, grads, hess }
    }

    #[allow(clippy::too_many_arguments)]
    fn residual_and_jacobian(
        &self,
        u: &[Complex64],
        radius: f64,
        normal: &[Complex64],
        target: Option<&[Complex64]>,
        weight: f64,
    ) -> (Vec<Complex64>, ComplexMatrix) {
        let (n, m) = (self.n, self.m);
        let k = m + 1;
        let p: Vec<Complex64> = (0..n).map(|i| Complex64::new(u[i].re, u[n + i].re)).collect();
        let kappa: Vec<Complex64> = (0..k).map(|j| Complex64::new(u[2 * n + j].re, u[2 * n + k + j].re)).collect();
        let (lambda, mu) = (&kappa[..m], kappa[m]);
        let ncols = 2 * n + 2 * k;
        // complex equations as (value, d/dp, d/dp̄, d/dκ)
        let mut eqs: Vec<(Complex64, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> = Vec::new();
        let grads: Vec<Vec<Complex64>> = self.grads.iter().map(|row| row.iter().map(|g| g.eval(&p)).collect()).collect();
        for i in 0..n {
            let mut val = mu * p[i].conj() / radius;
            let mut dp = vec![Complex64::new(0.0, 0.0); n];
            let mut dq = vec![Complex64::new(0.0, 0.0); n];
            let mut dk = vec![Complex64::new(0.0, 0.0); k];
            for j in 0..m {
                val += lambda[j] * grads[j][i];
                dk[j] = grads[j][i];
                for (l, d) in dp.iter_mut().enumerate() {
                    *d += lambda[j] * self.hess[j][i][l].eval(&p);
                }
            }
            dq[i] = mu / radius;
            dk[m] = p[i].conj() / radius;
            eqs.push((val, dp, dq, dk));
        }
        let cval: Complex64 = normal.iter().zip(&kappa).map(|(a, b)| a * b).sum::<Complex64>() - 1.0;
        eqs.push((cval, vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n], normal.to_vec()));
        if let Some(t) = target {
            for j in 0..m {
                let val = (self.values[j].eval(&p) - t[j]) * weight;
                let dp: Vec<Complex64> = grads[j].iter().map(|g| g * weight).collect();
                eqs.push((val, dp, vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); k]));
            }
        }
        let mut r = Vec::with_capacity(2 * eqs.len() + 1);
        let mut jac = ComplexMatrix::zeros(0, ncols);
        let ii = Complex64::new(0.0, 1.0);
        for (val, dp, dq, dk) in &eqs {
            let mut cols = vec![Complex64::new(0.0, 0.0); ncols];
            for l in 0..n {
                cols[l] = dp[l] + dq[l];
                cols[n + l] = ii * (dp[l] - dq[l]);
            }
            for j in 0..k {
                cols[2 * n + j] = dk[j];
                cols[2 * n + k + j] = ii * dk[j];
            }
            r.push(Complex64::new(val.re, 0.0));
            jac.push_row(&cols.iter().map(|c| Complex64::new(c.re, 0.0)).collect::<Vec<_>>());
            r.push(Complex64::new(val.im, 0.0));
            jac.push_row(&cols.iter().map(|c| Complex64::new(c.im, 0.0)).collect::<Vec<_>>());
        }
        let r2 = radius * radius;
        let norm2: f64 = p.iter().map(Complex64::norm_sqr).sum();
        r.push(Complex64::new((norm2 - r2) / r2, 0.0));
        let mut row = vec![Complex64::new(0.0, 0.0); ncols];
        for l in 0..n {
            row[l] = Complex64::new(2.0 * p[l].re / r2, 0.0);
            row[n + l] = Complex64::new(2.0 * p[l].im / r2, 0.0);
        }
        jac.push_row(&row);
        (r, jac)
    }
}

#[allow(clippy::too_many_arguments)]
fn mtame_step(
    f: &PolyMap,
    system: &MtameSystem,
    radius: f64,
    start: &[Complex64],
    kappa: Option<Vec<Complex64>>,
    normal: &[Complex64],
    target: Option<&[Complex64]>,
    weight: f64,
    track: usize,
) -> (ProbeRecord, Vec<Complex64>) {
    let (n, k) = (system.n, system.m + 1);
    let start = scale_to(start, radius);
    let kappa = kappa.unwrap_or_else(|| {
        let nn: f64 = normal.iter().map(Complex64::norm_sqr).sum();
        normal.iter().map(|c| c.conj() / nn).collect()
    });
    let mut u0: Vec<Complex64> = Vec::with_capacity(2 * n + 2 * k);
    u0.extend(start.iter().map(|c| Complex64::new(c.re, 0.0)));
    u0.extend(start.iter().map(|c| Complex64::new(c.im, 0.0)));
    u0.extend(kappa.iter().map(|c| Complex64::new(c.re, 0.0)));
    u0.extend(kappa.iter().map(|c| Complex64::new(c.im, 0.0)));
    let opts = NewtonOptions { divergence_norm: f64::INFINITY, ..NewtonOptions::default() };
    let out = gauss_newton(|u| system.residual_and_jacobian(u, radius, normal, target, weight), u0, &opts);
    let p: Vec<Complex64> = (0..n).map(|i| Complex64::new(out.x[i].re, out.x[n + i].re)).collect();
    let kappa: Vec<Complex64> =
        (0..k).map(|j| Complex64::new(out.x[2 * n + j].re, out.x[2 * n + k + j].re)).collect();
    let finite = p.iter().all(|c| c.re.is_finite() && c.im.is_finite()) && vec_norm(&p) > 0.0;
    let p = if finite { scale_to(&p, radius) } else { start };
    let image = f.eval_unchecked(&p);
    let mut objective = mtame_deficiency(f, &p);
    if let Some(t) = target {
        objective *= 1.0 + weight * distance(&image, t).powi(2);
    }
    let record =
        ProbeRecord { radius, track, minimizer: p, objective, gaffney_objective: None, image, converged: out.converged };
    (record, kappa)
}

fn track_evidence(records: &[ProbeRecord], schedule: &ProbeSchedule) -> Option<TrackEvidence> {
    let w = schedule.decay_window.max(2);
    if records.len() < w {
        return None;
    }
    let window = &records[records.len() - w..];
    let objectives: Vec<f64> = window.iter().map(|r| r.objective).collect();
    let ratios: Vec<f64> = objectives.windows(2).map(|p| if p[1] == 0.0 { f64::INFINITY } else { p[0] / p[1] }).collect();
    let decays = objectives[1..]
        .iter()
        .zip(&ratios)
        .all(|(o, r)| o.is_finite() && (*o <= schedule.floor || *r >= schedule.decay_factor));
    if !decays {
        return None;
    }
    let last = &window[w - 1].image;
    let image_spread = window.iter().map(|r| distance(&r.image, last)).fold(0.0, f64::max);
    if !(image_spread <= schedule.tolerance) {
        return None;
    }
    Some(TrackEvidence { track: window[0].track, objectives, ratios, image_spread })
}

fn candidates(tracks: &[Vec<ProbeRecord>], schedule: &ProbeSchedule, target: Option<&[Complex64]>) -> Vec<Candidate> {
    let mut clusters: Vec<(Vec<Complex64>, Vec<Vec<Complex64>>, Vec<TrackEvidence>)> = Vec::new();
    for records in tracks {
        let Some(ev) = track_evidence(records, schedule) else { continue };
        let t = records.last().expect("nonempty track").image.clone();
        if let Some(goal) = target {
            if distance(&t, goal) > schedule.tolerance {
                continue;
            }
        }
        match clusters.iter_mut().find(|(anchor, _, _)| distance(anchor, &t) <= schedule.tolerance) {
            Some(c) => {
                c.1.push(t);
                c.2.push(ev);
            }
            None => clusters.push((t.clone(), vec![t], vec![ev])),
        }
    }
    let mut out: Vec<Candidate> = clusters
        .into_iter()
        .map(|(_, members, evidence)| {
            let k = members.len() as f64;
            let dim = members[0].len();
            let t = (0..dim).map(|d| members.iter().map(|p| p[d]).sum::<Complex64>() / k).collect();
            Candidate { t, evidence }
        })
        .collect();
    out.sort_by(|a, b| compare_points(&a.t, &b.t));
    out
}
