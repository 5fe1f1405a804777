use num_traits::{One, Zero};

use crate::latgeom::{
    enumerate_faces, hull_vertices, lp_feasible, Covector, Face, LatticePoint, LinearConstraint, LpOutcome,
    Relation,
};
use crate::poly::SparsePoly;
use crate::scalar::{rat, Rational};

/// Bad faces of `conv(supp f)`: faces whose affine span passes through the
/// origin and which are cut out by a hyperplane `a · α = 0` with `a` of mixed
/// sign. Each returned face carries such an `a` as its normal (value `0`).
///
/// The face consisting of the origin alone is skipped: its face polynomial
/// is the constant term, whose value is already one of the hyperplanes
/// `t_i = F_i(0)`.
pub fn bad_faces(f: &SparsePoly) -> Vec<Face> {
    let supp = f.support_points();
    if supp.is_empty() {
        return Vec::new();
    }
    let hull = hull_vertices(&supp);
    enumerate_faces(&hull)
        .into_iter()
        .filter_map(|face| {
            let witness = is_bad_face(&supp, &face.points)?;
            Some(Face { points: face.points, normal: witness, value: Rational::zero(), dim: face.dim })
        })
        .collect()
}

/// Decides conditions (i) and (ii) for a candidate face `delta` of
/// `conv(supp)`, returning a mixed-sign separating covector if it is bad.
pub fn is_bad_face(supp: &[LatticePoint], delta: &[LatticePoint]) -> Option<Covector> {
    if delta.is_empty() || delta.iter().all(|p| p.iter().all(|&x| x == 0)) {
        return None;
    }
    if !origin_in_affine_span(delta) {
        return None;
    }
    let n = delta[0].len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut cs: Vec<LinearConstraint> = Vec::new();
            for b in supp {
                let row: Vec<Rational> = b.iter().map(|&x| rat(x)).collect();
                let rel = if delta.contains(b) { Relation::Eq } else { Relation::Gt };
                cs.push(LinearConstraint::new(row, rel, Rational::zero()));
            }
            cs.push(LinearConstraint::new(unit(n, i), Relation::Ge, Rational::one()));
            cs.push(LinearConstraint::new(unit(n, j), Relation::Le, -Rational::one()));
            if let LpOutcome::Feasible(a) = lp_feasible(n, &cs) {
                return Some(Covector(a).to_integral());
            }
        }
    }
    None
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); n];
    e[i] = Rational::one();
    e
}

/// `0 = Σ λ_k p_k` with `Σ λ_k = 1` for some real `λ`.
fn origin_in_affine_span(points: &[LatticePoint]) -> bool {
    let k = points.len();
    let n = points[0].len();
    let mut cs: Vec<LinearConstraint> = (0..n)
        .map(|d| LinearConstraint::new(points.iter().map(|p| rat(p[d])).collect(), Relation::Eq, Rational::zero()))
        .collect();
    cs.push(LinearConstraint::new(vec![Rational::one(); k], Relation::Eq, Rational::one()));
    lp_feasible(k, &cs).is_feasible()
}
