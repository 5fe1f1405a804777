//! End-to-end acceptance checks. Prints one `criterion N: PASS|FAIL` line
//! per criterion and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use atypical::asymptotic::{gaffney, k0_sample, kinf_probe, mtame_probe, nu, K0Options, ProbeSchedule};
use atypical::latgeom::{enumerate_faces, hull_vertices, is_face_oracle, LatticePoint};
use atypical::linalg::{vec_norm, ComplexMatrix};
use atypical::newton::{
    analyze, bad_faces, check_nondegenerate, is_convenient, sigma, weighted_euler_check, NondegOptions, SigmaOptions,
    VerdictStatus,
};
use atypical::poly::{parse_poly, PolyMap, SparsePoly};
use atypical::scalar::GaussRational;
use atypical::trivialize::{lift_vector, transport, TransportError, TransportStatus, TransportTask};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn hyperbola() -> PolyMap {
    PolyMap::parse(&["x*y - 1", "y^2*z"], &["x", "y", "z"]).unwrap()
}

fn curves() -> PolyMap {
    PolyMap::parse(&["x*y + 1", "(x*y*z+1)*(x*y*z+z-1)"], &["x", "y", "z"]).unwrap()
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let f = hyperbola();
    let k0 = k0_sample(&f, &K0Options::new(64, 1));
    ensure(k0.len() == 1, format!("k0 has {} clusters", k0.len()))?;
    let d = k0.distance_to(&[c(-1.0), c(0.0)]).unwrap();
    ensure(d < 1e-6, format!("k0 cluster {d:e} from (-1,0)"))?;

    let mtame = mtame_probe(&f, &ProbeSchedule { seed: 1, ..ProbeSchedule::default() }, None).map_err(|e| e.to_string())?;
    ensure(mtame.candidates.len() == 1, format!("mtame has {} candidates", mtame.candidates.len()))?;
    let t = &mtame.candidates[0].t;
    let dm = vec_norm(&[t[0] - c(-1.0), t[1]]);
    ensure(dm < 1e-3, format!("mtame candidate {dm:e} from (-1,0)"))?;

    let schedule = ProbeSchedule { seed_curves: vec!["1:1,1:-1,0:0".parse().unwrap()], ..ProbeSchedule::default() };
    let kinf = kinf_probe(&f, &schedule, Some(&[c(0.0), c(0.0)])).map_err(|e| e.to_string())?;
    let hit = kinf
        .candidates
        .iter()
        .find(|cand| vec_norm(&cand.t) < 1e-3)
        .ok_or("kinf reports no candidate at (0,0)")?;
    let decays = hit.evidence.iter().any(|e| e.objectives.len() == 4 && e.ratios.iter().all(|&r| r >= 2.0));
    ensure(decays, "kinf evidence lacks a 2x decay over the last 4 radii")?;

    let report = sigma(&f, &SigmaOptions::new(64, 1));
    ensure(report.sigma_inf.is_empty(), "Sigma_inf is not empty")?;
    let planes: Vec<String> = report.hyperplanes.iter().map(|h| format!("t{}={}", h.index, h.constant)).collect();
    ensure(planes == ["t1=-1", "t2=0"], format!("hyperplanes {planes:?}"))?;
    let b_in_sigma = report.k0.distance_to(&[c(-1.0), c(0.0)]).unwrap_or(f64::INFINITY) < 1e-6;
    ensure(b_in_sigma, "(-1,0) is not in Sigma")?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("K0 = {{(-1,0)}}, M_inf candidate (-1,0), K_inf candidate (0,0), Sigma_inf empty, {planes:?} in {:.2?}", start.elapsed()))
}

/// `g(dF)^2` from the closed form, with `t_1 = xy + 1`.
fn curves_gaffney_sq(p: &[Complex64]) -> (f64, f64) {
    let (x, y, z) = (p[0], p[1], p[2]);
    let t1 = x * y + 1.0;
    let a = (2.0 * t1 * (t1 - 1.0) * z + 1.0).norm_sqr();
    let b = x.norm_sqr() + y.norm_sqr();
    let den = b + a + z.norm_sqr().powi(2) * b * (2.0 * t1 - 1.0).norm_sqr();
    (a * b / den, den)
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let f = curves();
    let k0 = k0_sample(&f, &K0Options::new(64, 1));
    ensure(!k0.is_empty(), "k0 is empty")?;
    let mut worst = 0.0f64;
    for t in &k0.points {
        let (u, v) = (t[0], t[1]);
        let d = (u - 1.0).norm().min((4.0 * u * (u - 1.0) * (v + 1.0) + 1.0).norm());
        worst = worst.max(d);
    }
    ensure(worst < 1e-6, format!("k0 point off the critical curves by {worst:e}"))?;

    let one = [c(1.0), c(1.0), c(1.0)];
    let g = gaffney(&f.jacobian(&one).unwrap()).unwrap();
    ensure((g * g - 10.0 / 9.0).abs() < 1e-10, format!("g^2 at (1,1,1) = {}", g * g))?;
    ensure((curves_gaffney_sq(&one).0 - 10.0 / 9.0).abs() < 1e-12, "closed form at (1,1,1)")?;

    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let mut checked = 0;
    while checked < 100 {
        let p: Vec<Complex64> =
            (0..3).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let jac = f.jacobian(&p).unwrap();
        if jac.singular_values()[1] < 1e-6 {
            continue;
        }
        let (formula, _) = curves_gaffney_sq(&p);
        let g = gaffney(&jac).unwrap();
        ensure((g * g - formula).abs() <= 1e-9 * formula.max(1e-300), format!("g^2 {} vs {formula} at {p:?}", g * g))?;
        checked += 1;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} K0 clusters on the curves (worst {worst:.1e}), g^2(1,1,1) = 10/9, 100 random points agree in {:.2?}", k0.len(), start.elapsed()))
}

fn criterion_3() -> Check {
    let f = PolyMap::parse(&["x + x^2*y"], &["x", "y"]).unwrap();
    let p = &f.components()[0];
    ensure(bad_faces(p).is_empty(), "bad faces found")?;
    let verdicts = check_nondegenerate(&f, &NondegOptions::new(64, 0));
    ensure(verdicts.len() == 3, format!("{} face tuples at infinity", verdicts.len()))?;
    ensure(verdicts.iter().all(|v| v.status == VerdictStatus::PresumedNondegenerate), "a face is degenerate")?;
    let report = sigma(&f, &SigmaOptions::new(64, 0));
    ensure(report.k0.is_empty() && report.sigma_inf.is_empty(), "K0 or Sigma_inf not empty")?;
    let planes: Vec<String> = report.hyperplanes.iter().map(|h| format!("t{}={}", h.index, h.constant)).collect();
    ensure(planes == ["t1=0"], format!("hyperplanes {planes:?}"))?;
    Ok("no bad faces, 3 faces at infinity presumed nondegenerate, K0 = Sigma_inf = {}, Sigma = {0}".into())
}

fn criterion_4() -> Check {
    let f = PolyMap::parse(&["x^2 + y^2"], &["x", "y"]).unwrap();
    ensure(is_convenient(&f.components()[0]), "not convenient")?;
    let report = sigma(&f, &SigmaOptions::new(64, 0));
    ensure(report.k0.len() == 1 && report.k0.points[0][0].norm() < 1e-10, "K0 is not {0}")?;
    ensure(report.sigma_inf.is_empty(), "Sigma_inf not empty")?;
    let planes: Vec<String> = report.hyperplanes.iter().map(|h| format!("t{}={}", h.index, h.constant)).collect();
    ensure(planes == ["t1=0"], format!("hyperplanes {planes:?}"))?;
    Ok("convenient, Sigma = K0 = {0}".into())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut faces = 0;
    for trial in 0..100 {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=8);
        let pts: BTreeSet<LatticePoint> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..5)).collect()).collect();
        let pts: Vec<LatticePoint> = pts.into_iter().collect();
        let enumerated: BTreeSet<Vec<LatticePoint>> =
            enumerate_faces(&hull_vertices(&pts)).into_iter().map(|f| f.points).collect();
        let mut oracle = BTreeSet::new();
        for mask in 1u32..(1 << pts.len()) {
            let s: Vec<LatticePoint> =
                pts.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| p.clone()).collect();
            if is_face_oracle(&pts, &s) {
                oracle.insert(s);
            }
        }
        ensure(enumerated == oracle, format!("mismatch on trial {trial}: {pts:?}"))?;
        faces += oracle.len();
    }
    Ok(format!("100 supports, {faces} faces, zero mismatches"))
}

fn random_poly(rng: &mut ChaCha8Rng) -> SparsePoly {
    let n = rng.gen_range(1..=4);
    let terms = rng.gen_range(1..=6);
    let terms: Vec<(Vec<u32>, GaussRational)> = (0..terms)
        .map(|_| {
            let mut e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=5)).collect();
            while e.iter().sum::<u32>() > 5 {
                let i = e.iter().position(|&x| x > 0).unwrap();
                e[i] -= 1;
            }
            let coeff = &GaussRational::from_int(rng.gen_range(-5..=5))
                + &(&GaussRational::from_int(rng.gen_range(-5..=5)) * &GaussRational::imag_unit());
            (e, coeff)
        })
        .collect();
    SparsePoly::from_terms(n, terms).unwrap()
}

fn criterion_6() -> Check {
    let fixtures: &[(&str, &[&str])] = &[
        ("x*y - 1", &["x", "y", "z"]),
        ("y^2*z", &["x", "y", "z"]),
        ("x*y + 1", &["x", "y", "z"]),
        ("(x*y*z+1)*(x*y*z+z-1)", &["x", "y", "z"]),
        ("x + x^2*y", &["x", "y"]),
        ("x^2 + y^2", &["x", "y"]),
        ("(x+y)^2 + x*y^3", &["x", "y"]),
        ("x^2*y^2 - 2*x*y + x", &["x", "y"]),
    ];
    let mut polys: Vec<SparsePoly> = fixtures.iter().map(|(t, v)| parse_poly(t, v).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut random = 0;
    while random < 50 {
        let p = random_poly(&mut rng);
        if !p.is_zero() {
            polys.push(p);
            random += 1;
        }
    }
    let mut faces = 0;
    for p in &polys {
        for face in analyze(p).map_err(|e| e.to_string())?.faces_at_infinity {
            ensure(weighted_euler_check(p, &face).map_err(|e| e.to_string())?, format!("{p} on {:?}", face.points))?;
            faces += 1;
        }
    }
    Ok(format!("{} fixtures + 50 random polynomials, {faces} faces", fixtures.len()))
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, n, |_, _| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
}

fn random_unitary(rng: &mut ChaCha8Rng, k: usize) -> ComplexMatrix {
    loop {
        let a = random_matrix(rng, k, k);
        let mut q: Vec<Vec<Complex64>> = Vec::new();
        for j in 0..k {
            let mut v = a.column(j);
            for u in &q {
                let proj: Complex64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
            let norm = vec_norm(&v);
            if norm < 1e-3 {
                break;
            }
            q.push(v.iter().map(|x| x / norm).collect());
        }
        if q.len() == k {
            return ComplexMatrix::from_fn(k, k, |i, j| q[j][i]);
        }
    }
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shape = |rng: &mut ChaCha8Rng, min_m: usize| {
        let n = rng.gen_range(min_m.max(1)..=4);
        (rng.gen_range(min_m.max(1)..=n), n)
    };
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-300);
    for _ in 0..100 {
        let (m, n) = shape(&mut rng, 1);
        let j = random_matrix(&mut rng, m, n);
        let s = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let sj = j.scale(s);
        ensure(rel(nu(&sj).unwrap(), s.norm() * nu(&j).unwrap()), "nu homogeneity")?;
        ensure(rel(gaffney(&sj).unwrap(), s.norm() * gaffney(&j).unwrap()), "g homogeneity")?;
    }
    for _ in 0..100 {
        let (m, n) = shape(&mut rng, 1);
        let j = random_matrix(&mut rng, m, n);
        let ujv = random_unitary(&mut rng, m).matmul(&j).matmul(&random_unitary(&mut rng, n));
        ensure((nu(&ujv).unwrap() - nu(&j).unwrap()).abs() <= 1e-10 * (1.0 + nu(&j).unwrap()), "unitary invariance")?;
    }
    for _ in 0..100 {
        let (m, n) = shape(&mut rng, 2);
        let r = rng.gen_range(1..m);
        let j = random_matrix(&mut rng, m, r).matmul(&random_matrix(&mut rng, r, n));
        ensure(nu(&j).unwrap() < 1e-8 && gaffney(&j).unwrap() < 1e-8, "rank-deficient matrix not flagged")?;
        let full = random_matrix(&mut rng, m, n);
        if full.singular_values()[m - 1] > 1e-3 {
            ensure(nu(&full).unwrap() > 1e-8 && gaffney(&full).unwrap() > 1e-8, "full-rank matrix flagged")?;
        }
    }
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let j = random_matrix(&mut rng, 1, n);
        let norm = vec_norm(j.row(0));
        ensure(rel(nu(&j).unwrap(), norm) && rel(gaffney(&j).unwrap(), norm), "m = 1 disagreement")?;
    }
    Ok("homogeneity, unitary invariance, zero coincidence, m = 1 agreement: 100 trials each".into())
}

fn criterion_8() -> Check {
    let f = PolyMap::parse(&["x"], &["x", "y"]).unwrap();
    let task = TransportTask::new(f.clone(), vec![c(0.0), c(5.0)], vec![vec![c(0.0)], vec![c(0.3)]]);
    let trace = transport(&task).map_err(|e| e.to_string())?;
    ensure(trace.status == TransportStatus::Ok, format!("status {:?}", trace.status))?;
    let end = trace.end();
    let expected = [c(0.3), c(24.91f64.sqrt())];
    let d = vec_norm(&[end[0] - expected[0], end[1] - expected[1]]);
    ensure(d < 1e-6, format!("end point off by {d:e}"))?;
    ensure(trace.norm_drift <= 1e-6, format!("norm drift {:e}", trace.norm_drift))?;

    let g = curves();
    let z0 = (-1.0 + 481f64.sqrt()) / 40.0;
    let start = vec![c(4.0), c(1.0), c(z0)];
    let waypoints = [(5.0, 5.0), (5.5, 5.0), (5.0, 5.5), (4.5, 5.0), (5.0, 4.5), (5.5, 5.0), (5.0, 5.0)];
    let path: Vec<Vec<Complex64>> = waypoints.iter().map(|&(a, b)| vec![c(a), c(b)]).collect();
    let loop_trace = transport(&TransportTask::new(g.clone(), start, path)).map_err(|e| e.to_string())?;
    ensure(loop_trace.status == TransportStatus::Ok, format!("loop status {:?}", loop_trace.status))?;
    let back = g.eval(loop_trace.end()).unwrap();
    let miss = vec_norm(&[back[0] - c(5.0), back[1] - c(5.0)]);
    ensure(miss < 1e-5, format!("loop misses the start fiber by {miss:e}"))?;

    match lift_vector(&f, &[c(1.0), c(0.0)], &[c(1.0)]) {
        Err(TransportError::RankDeficient) => {}
        other => return Err(format!("lift at (1,0) gave {other:?}")),
    }
    Ok(format!("closed form end error {d:.1e}, drift {:.1e}; loop fiber residual {miss:.1e}; lift at (1,0) rank deficient", trace.norm_drift))
}

fn run_cli(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_atypical"))
        .args(args)
        .env("ATYPICAL_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(matches!(out.status.code(), Some(0) | Some(3)), format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn criterion_9() -> Check {
    let hyperbola = ["--vars", "x,y,z", "--map", "x*y-1", "y^2*z"];
    let curves = ["--vars", "x,y,z", "--map", "x*y+1", "(x*y*z+1)*(x*y*z+z-1)"];
    let broughton = ["--vars", "x,y", "--map", "x + x^2*y"];
    let commands: Vec<Vec<&str>> = vec![
        [&["sigma"][..], &hyperbola, &["--seed", "1"]].concat(),
        [&["k0"][..], &hyperbola, &["--seed", "1"]].concat(),
        [&["mtame"][..], &hyperbola, &["--seed", "1"]].concat(),
        [&["kinf"][..], &hyperbola, &["--seed-curve", "1:1,1:-1,0:0", "--target", "0,0"]].concat(),
        [&["k0"][..], &curves, &["--seed", "1"]].concat(),
        [&["badfaces"][..], &broughton].concat(),
        [&["nondeg"][..], &broughton].concat(),
        [&["sigma"][..], &broughton].concat(),
        vec!["sigma", "--vars", "x,y", "--map", "x^2 + y^2"],
        vec!["trivialize", "--vars", "x,y", "--map", "x", "--start", "0,5", "--path", "0;0.3"],
    ];
    for args in &commands {
        let one = run_cli(args, "1")?;
        let many = run_cli(args, "4")?;
        ensure(one == many, format!("{args:?} differs between 1 and 4 threads"))?;
    }
    Ok(format!("{} commands byte-identical with 1 and 4 threads", commands.len()))
}

fn main() {
    let criteria: [fn() -> Check; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let mut failed = 0;
    for (k, check) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS ({detail})", k + 1),
            Err(why) => {
                println!("criterion {}: FAIL ({why})", k + 1);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
