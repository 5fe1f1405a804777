mod common;

use atypical::newton::analyze;
use atypical::poly::parse_poly;
use common::{random_poly, FIXTURES};
use num_complex::Complex64;
use proptest::prelude::*;

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn complex_point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.4f64..1.4, -1.4f64..1.4).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

#[test]
fn fixtures_round_trip() {
    for (text, vars) in FIXTURES {
        let p = parse_poly(text, vars).unwrap();
        let printed = p.to_string_with(vars);
        let again = parse_poly(&printed, vars).unwrap();
        assert_eq!(p.terms(), again.terms(), "{text} printed as {printed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_round_trip(p in random_poly(4, 4, 6)) {
        let vars = names(p.nvars());
        let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
        let again = parse_poly(&p.to_string_with(&refs), &refs).unwrap();
        prop_assert_eq!(p.terms(), again.terms());
    }

    #[test]
    fn partials_match_finite_differences(
        (p, z, i) in random_poly(4, 4, 6).prop_flat_map(|p| {
            let n = p.nvars();
            (Just(p), complex_point(n), 0..n)
        })
    ) {
        let h = 1e-5;
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp[i] += h;
        zm[i] -= h;
        let fd = (p.evaluate(&zp).unwrap() - p.evaluate(&zm).unwrap()) / (2.0 * h);
        let exact = p.partial(i).unwrap().evaluate(&z).unwrap();
        let scale = 1.0 + exact.norm();
        prop_assert!((fd - exact).norm() <= 1e-6 * scale, "fd {} vs {}", fd, exact);
    }

    #[test]
    fn face_and_complement_partition_the_support(p in random_poly(4, 4, 6)) {
        prop_assume!(!p.is_zero());
        let supp = p.support_points();
        for face in analyze(&p).unwrap().faces_at_infinity {
            let on_face = p.face_restriction(&face).unwrap();
            let rest: Vec<_> = supp.iter().filter(|q| !face.contains(q)).cloned().collect();
            let off_face = p.restrict_to_points(&rest).unwrap();
            prop_assert_eq!(on_face.add(&off_face), p.clone());
        }
    }
}
