use atypical::asymptotic::{gaffney, k0_sample, kinf_probe, nu, K0Options, ProbeSchedule};
use atypical::linalg::{vec_norm, ComplexMatrix};
use atypical::poly::PolyMap;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn matrix(m: usize, n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), m * n)
        .prop_map(move |v| ComplexMatrix::from_fn(m, n, |i, j| v[i * n + j]))
}

/// `m × n` with `1 <= m <= n <= 4`.
fn any_matrix() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=4).prop_flat_map(|n| (1..=n).prop_map(move |m| (m, n))).prop_flat_map(|(m, n)| matrix(m, n))
}

/// Gram–Schmidt on a random square matrix.
fn unitary(k: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(k, k).prop_filter_map("singular draw", move |a| {
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
                return None;
            }
            q.push(v.iter().map(|x| x / norm).collect());
        }
        Some(ComplexMatrix::from_fn(k, k, |i, j| q[j][i]))
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn homogeneity(j in any_matrix(), c in complex()) {
        let cj = j.scale(c);
        prop_assert!(rel_close(nu(&cj).unwrap(), c.norm() * nu(&j).unwrap(), 1e-10)
            || nu(&j).unwrap() < 1e-14);
        prop_assert!(rel_close(gaffney(&cj).unwrap(), c.norm() * gaffney(&j).unwrap(), 1e-10));
    }

    #[test]
    fn nu_is_unitarily_invariant(
        (j, u, v) in (1usize..=4)
            .prop_flat_map(|n| (1..=n).prop_map(move |m| (m, n)))
            .prop_flat_map(|(m, n)| (matrix(m, n), unitary(m), unitary(n)))
    ) {
        let ujv = u.matmul(&j).matmul(&v);
        prop_assert!((nu(&ujv).unwrap() - nu(&j).unwrap()).abs() <= 1e-10 * (1.0 + nu(&j).unwrap()));
    }

    #[test]
    fn single_row_agreement(row in prop::collection::vec(complex(), 1..=5)) {
        let j = ComplexMatrix::from_rows(std::slice::from_ref(&row));
        let norm = vec_norm(&row);
        prop_assert!(rel_close(nu(&j).unwrap(), norm, 1e-12));
        prop_assert!(rel_close(gaffney(&j).unwrap(), norm, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn rank_deficient_matrices_vanish(
        (a, b) in (2usize..=4)
            .prop_flat_map(|n| (2..=n).prop_map(move |m| (m, n)))
            .prop_flat_map(|(m, n)| (1..m).prop_map(move |r| (m, n, r)))
            .prop_flat_map(|(m, n, r)| (matrix(m, r), matrix(r, n)))
    ) {
        let j = a.matmul(&b);
        prop_assert!(nu(&j).unwrap() < 1e-8);
        prop_assert!(gaffney(&j).unwrap() < 1e-8);
    }

    #[test]
    fn full_rank_matrices_do_not(j in any_matrix()) {
        prop_assume!(j.singular_values().last().copied().unwrap_or(0.0) > 1e-3);
        prop_assert!(nu(&j).unwrap() > 1e-8);
        prop_assert!(gaffney(&j).unwrap() > 1e-8);
    }
}

fn hyperbola_family_map() -> PolyMap {
    PolyMap::parse(&["x*y + 1", "(x*y*z+1)*(x*y*z+z-1)"], &["x", "y", "z"]).unwrap()
}

/// The closed form for `g(dF)^2` of the map above, with `t_1 = xy + 1`.
fn gaffney_sq_closed_form(p: &[Complex64]) -> (f64, f64) {
    let (x, y, z) = (p[0], p[1], p[2]);
    let t1 = x * y + 1.0;
    let a = (2.0 * t1 * (t1 - 1.0) * z + 1.0).norm_sqr();
    let b = x.norm_sqr() + y.norm_sqr();
    let den = b + a + z.norm_sqr().powi(2) * b * (2.0 * t1 - 1.0).norm_sqr();
    (a * b / den, den)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gaffney_matches_closed_form(p in prop::collection::vec(complex(), 3)) {
        let f = hyperbola_family_map();
        let (formula, den) = gaffney_sq_closed_form(&p);
        prop_assume!(den > 1e-3);
        let g = gaffney(&f.jacobian(&p).unwrap()).unwrap();
        prop_assert!((g * g - formula).abs() <= 1e-9 * (1.0 + formula), "{} vs {}", g * g, formula);
    }
}

#[test]
fn gaffney_at_the_unit_point() {
    let f = hyperbola_family_map();
    let one = vec![Complex64::new(1.0, 0.0); 3];
    let g = gaffney(&f.jacobian(&one).unwrap()).unwrap();
    assert!((g * g - 10.0 / 9.0).abs() < 1e-10);
    assert!((gaffney_sq_closed_form(&one).0 - 10.0 / 9.0).abs() < 1e-15);
}

#[test]
fn critical_values_have_certified_preimages() {
    let maps: &[(&[&str], &[&str])] = &[
        (&["x*y - 1", "y^2*z"], &["x", "y", "z"]),
        (&["x*y + 1", "(x*y*z+1)*(x*y*z+z-1)"], &["x", "y", "z"]),
        (&["x^2 + y^2"], &["x", "y"]),
        (&["x^3 - 3*x + y^2"], &["x", "y"]),
    ];
    for (exprs, vars) in maps {
        let f = PolyMap::parse(exprs, vars).unwrap();
        let cloud = k0_sample(&f, &K0Options::new(32, 11));
        assert!(!cloud.is_empty(), "{exprs:?}");
        for (t, x) in cloud.points.iter().zip(&cloud.preimages) {
            let fx = f.eval(x).unwrap();
            let d: Vec<Complex64> = fx.iter().zip(t).map(|(a, b)| a - b).collect();
            assert!(vec_norm(&d) < 1e-8, "{exprs:?}: image off by {:e}", vec_norm(&d));
            let jac = f.jacobian(x).unwrap();
            let sv = jac.singular_values();
            assert!(nu(&jac).unwrap() < 1e-8 * (1.0 + sv[0]));
        }
    }
}

#[test]
fn probes_do_not_depend_on_thread_count() {
    let f = PolyMap::parse(&["x*y - 1", "y^2*z"], &["x", "y", "z"]).unwrap();
    let schedule = ProbeSchedule { radii: vec![1.0, 10.0, 100.0, 1000.0, 1e4], restarts: 4, seed: 9, ..Default::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let report = kinf_probe(&f, &schedule, None).unwrap();
            let cloud = k0_sample(&f, &K0Options::new(16, 9));
            format!("{report:?}{cloud:?}")
        })
    };
    assert_eq!(run(1), run(3));
}
