use std::collections::BTreeSet;

use atypical::latgeom::{
    enumerate_faces, hull_vertices, is_face_oracle, lp_feasible, LatticePoint, LinearConstraint, LpOutcome, Relation,
};
use atypical::scalar::{GaussRational, Rational};
use proptest::prelude::*;

fn point_set(max_n: usize, max_len: usize) -> impl Strategy<Value = Vec<LatticePoint>> {
    (1..=max_n).prop_flat_map(move |n| prop::collection::vec(prop::collection::vec(0i64..5, n), 1..=max_len))
}

fn dedup(points: &[LatticePoint]) -> Vec<LatticePoint> {
    points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

fn int(n: i64) -> Rational {
    GaussRational::from_int(n).re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn faces_match_brute_force(points in point_set(4, 8)) {
        let pts = dedup(&points);
        let enumerated: BTreeSet<Vec<LatticePoint>> =
            enumerate_faces(&hull_vertices(&pts)).into_iter().map(|f| f.points).collect();
        let mut oracle = BTreeSet::new();
        for mask in 1u32..(1 << pts.len()) {
            let subset: Vec<LatticePoint> =
                pts.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, p)| p.clone()).collect();
            if is_face_oracle(&pts, &subset) {
                oracle.insert(subset);
            }
        }
        prop_assert_eq!(enumerated, oracle);
    }

    #[test]
    fn every_face_reverifies(points in point_set(4, 8)) {
        let poly = hull_vertices(&points);
        for face in enumerate_faces(&poly) {
            for g in &poly.generators {
                let v = face.normal.eval(g);
                if face.contains(g) {
                    prop_assert_eq!(&v, &face.value);
                } else {
                    prop_assert!(v > face.value);
                }
            }
        }
    }

    #[test]
    fn hull_is_idempotent(points in point_set(4, 8)) {
        let once = hull_vertices(&points);
        let twice = hull_vertices(&once.vertices);
        prop_assert_eq!(&twice.vertices, &once.vertices);
        prop_assert_eq!(twice.dim, once.dim);
    }

    #[test]
    fn lp_witnesses_satisfy_constraints(
        rows in prop::collection::vec((prop::collection::vec(-3i64..4, 3), 0usize..5, -4i64..5), 1..7)
    ) {
        let relations = [Relation::Eq, Relation::Ge, Relation::Gt, Relation::Le, Relation::Lt];
        let constraints: Vec<LinearConstraint> = rows
            .iter()
            .map(|(a, r, b)| LinearConstraint::new(a.iter().map(|&x| int(x)).collect(), relations[*r], int(*b)))
            .collect();
        if let LpOutcome::Feasible(x) = lp_feasible(3, &constraints) {
            for c in &constraints {
                prop_assert!(c.holds_at(&x), "{:?} violated at {:?}", c, x);
            }
        }
    }
}

#[test]
fn infeasible_systems_are_reported() {
    let x_gt = LinearConstraint::new(vec![int(1)], Relation::Gt, int(0));
    let x_le = LinearConstraint::new(vec![int(1)], Relation::Le, int(0));
    assert_eq!(lp_feasible(1, &[x_gt.clone(), x_le]), LpOutcome::Infeasible);
    assert!(lp_feasible(1, &[x_gt]).is_feasible());
}
