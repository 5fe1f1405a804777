use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::exact::{self, dot};
use super::lp::{lp_feasible, LinearConstraint, Relation};
use crate::scalar::{format_rational, rat, Rational};

pub type LatticePoint = Vec<i64>;

fn to_q(p: &[i64]) -> Vec<Rational> {
    p.iter().map(|&x| rat(x)).collect()
}

/// A dual vector `P`, evaluated on points as `P(β) = Σ β_i p_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Covector(pub Vec<Rational>);

impl Covector {
    pub fn from_ints(v: &[i64]) -> Self {
        Self(to_q(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, p: &[i64]) -> Rational {
        self.0.iter().zip(p).map(|(c, &x)| c * rat(x)).sum()
    }

    /// Positive rescaling to a primitive integer vector.
    pub fn to_integral(&self) -> Self {
        let lcm = self.0.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|q| (q * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return self.clone();
        }
        Self(ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }
}

/// A face of a lattice polytope together with a supporting covector.
///
/// `points` are the polytope's generators lying on the face, sorted. Under
/// the minimizing convention `normal · p = value` on the face and
/// `normal · q > value` for every other generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub points: Vec<LatticePoint>,
    pub normal: Covector,
    pub value: Rational,
    pub dim: usize,
}

impl Face {
    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.iter().any(|q| q == p)
    }

    pub fn contains_origin(&self) -> bool {
        self.points.iter().any(|q| q.iter().all(|&x| x == 0))
    }

    /// Exact re-check of the supporting conditions against `generators`.
    pub fn supports(&self, generators: &[LatticePoint]) -> bool {
        generators.iter().all(|g| {
            let v = self.normal.eval(g);
            if self.contains(g) {
                v == self.value
            } else {
                v > self.value
            }
        })
    }
}

impl Serialize for Face {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Face", 3)?;
        st.serialize_field("points", &self.points)?;
        st.serialize_field("normal", &self.normal.to_strings())?;
        st.serialize_field("value", &format_rational(&self.value))?;
        st.end()
    }
}

/// Convex hull of finitely many lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    /// sorted, deduplicated
    pub generators: Vec<LatticePoint>,
    /// the irredundant generators, sorted
    pub vertices: Vec<LatticePoint>,
    pub dim: usize,
}

impl LatticePolytope {
    pub fn ambient_dim(&self) -> usize {
        self.generators.first().map_or(0, Vec::len)
    }
}

fn dedup(points: &[LatticePoint]) -> Vec<LatticePoint> {
    let set: BTreeSet<LatticePoint> = points.iter().cloned().collect();
    set.into_iter().collect()
}

/// Affine dimension of a point set (`0` for a single point or none).
pub fn affine_dim(points: &[LatticePoint]) -> usize {
    let Some(first) = points.first() else { return 0 };
    let diffs: Vec<Vec<Rational>> =
        points[1..].iter().map(|p| p.iter().zip(first).map(|(a, b)| rat(a - b)).collect()).collect();
    exact::rank(&diffs)
}

/// Whether `p` is a convex combination of `others`.
fn in_convex_hull(p: &[i64], others: &[&LatticePoint]) -> bool {
    if others.is_empty() {
        return false;
    }
    let k = others.len();
    let mut cs = Vec::with_capacity(p.len() + 1 + k);
    for d in 0..p.len() {
        cs.push(LinearConstraint::new(others.iter().map(|q| rat(q[d])).collect(), Relation::Eq, rat(p[d])));
    }
    cs.push(LinearConstraint::new(vec![Rational::one(); k], Relation::Eq, Rational::one()));
    for j in 0..k {
        let mut e = vec![Rational::zero(); k];
        e[j] = Rational::one();
        cs.push(LinearConstraint::new(e, Relation::Ge, Rational::zero()));
    }
    lp_feasible(k, &cs).is_feasible()
}

/// Convex hull with its vertex set: one LP per point decides whether it is
/// a convex combination of the others.
///
/// # Panics
/// If `points` is empty or the points have different lengths.
pub fn hull_vertices(points: &[LatticePoint]) -> LatticePolytope {
    assert!(!points.is_empty(), "hull of an empty point set");
    let n = points[0].len();
    assert!(points.iter().all(|p| p.len() == n), "points of mixed dimension");
    let generators = dedup(points);
    let vertices = generators
        .iter()
        .filter(|p| {
            let others: Vec<&LatticePoint> = generators.iter().filter(|q| q != p).collect();
            !in_convex_hull(p, &others)
        })
        .cloned()
        .collect();
    let dim = affine_dim(&generators);
    LatticePolytope { generators, vertices, dim }
}

/// The face on which `covector` attains its minimum over the polytope.
pub fn minimizing_face(poly: &LatticePolytope, covector: &Covector) -> Face {
    let values: Vec<Rational> = poly.generators.iter().map(|g| covector.eval(g)).collect();
    let min = values.iter().min().expect("nonempty polytope").clone();
    let points: Vec<LatticePoint> =
        poly.generators.iter().zip(&values).filter(|(_, v)| **v == min).map(|(g, _)| g.clone()).collect();
    let dim = affine_dim(&points);
    Face { points, normal: covector.clone(), value: min, dim }
}

/// Every face of the polytope, from vertices up to the polytope itself.
///
/// Facets are found among hyperplanes (inside the affine hull) through
/// affinely independent `dim`-subsets of vertices; the remaining faces are
/// intersections of facets. A face's covector is the sum of the normals of
/// the facets containing it. The improper face gets a covector orthogonal
/// to the affine hull (zero when the polytope is full-dimensional).
/// Output is sorted by dimension, then by point list.
pub fn enumerate_faces(poly: &LatticePolytope) -> Vec<Face> {
    let n = poly.ambient_dim();
    let verts = &poly.vertices;
    let d = poly.dim;
    let base = &verts[0];
    let diffs: Vec<Vec<Rational>> =
        verts[1..].iter().map(|v| v.iter().zip(base).map(|(a, b)| rat(a - b)).collect()).collect();
    let hull_dirs = exact::row_basis(&diffs);
    debug_assert_eq!(hull_dirs.len(), d);

    let improper_normal = {
        let perp = exact::nullspace(&hull_dirs, n);
        match perp.first() {
            Some(v) => Covector(v.clone()).to_integral(),
            None => Covector(vec![Rational::zero(); n]),
        }
    };
    let mut faces = vec![finish_face(poly, improper_normal)];
    if d == 0 {
        return faces;
    }

    // facets, keyed by vertex-index set
    let mut facets: Vec<(BTreeSet<usize>, Vec<Rational>)> = Vec::new();
    for subset in crate::linalg::combinations(verts.len(), d) {
        let s0 = &verts[subset[0]];
        // c = Σ μ_t ℓ_t with c·(s_k − s0) = 0
        let rows: Vec<Vec<Rational>> = subset[1..]
            .iter()
            .map(|&k| {
                let diff: Vec<Rational> = verts[k].iter().zip(s0).map(|(a, b)| rat(a - b)).collect();
                hull_dirs.iter().map(|l| dot(l, &diff)).collect()
            })
            .collect();
        let ns = exact::nullspace(&rows, d);
        if ns.len() != 1 {
            continue;
        }
        let mut c = vec![Rational::zero(); n];
        for (mu, l) in ns[0].iter().zip(&hull_dirs) {
            for (ci, li) in c.iter_mut().zip(l) {
                *ci += mu * li;
            }
        }
        let vals: Vec<Rational> = verts.iter().map(|v| dot(&c, &to_q(v))).collect();
        let v0 = &vals[subset[0]];
        let orientation = if vals.iter().all(|v| v >= v0) {
            Rational::one()
        } else if vals.iter().all(|v| v <= v0) {
            -Rational::one()
        } else {
            continue;
        };
        let on: BTreeSet<usize> = (0..verts.len()).filter(|&k| vals[k] == *v0).collect();
        if facets.iter().any(|(s, _)| *s == on) {
            continue;
        }
        let normal = Covector(c.iter().map(|x| x * &orientation).collect()).to_integral().0;
        facets.push((on, normal));
    }

    // close under intersection
    let mut sets: BTreeSet<BTreeSet<usize>> = facets.iter().map(|(s, _)| s.clone()).collect();
    loop {
        let current: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in current.iter().enumerate() {
            for b in &current[i + 1..] {
                let meet: BTreeSet<usize> = a.intersection(b).copied().collect();
                if !meet.is_empty() && sets.insert(meet) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }

    for set in sets {
        let mut normal = vec![Rational::zero(); n];
        for (fs, fnormal) in &facets {
            if set.is_subset(fs) {
                for (a, b) in normal.iter_mut().zip(fnormal) {
                    *a += b;
                }
            }
        }
        faces.push(finish_face(poly, Covector(normal).to_integral()));
    }
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.points.cmp(&b.points)));
    faces
}

fn finish_face(poly: &LatticePolytope, normal: Covector) -> Face {
    minimizing_face(poly, &normal)
}

/// Brute-force face test: does some covector take one constant value on
/// `candidate` and strictly larger values on the remaining points?
pub fn is_face_oracle(points: &[LatticePoint], candidate: &[LatticePoint]) -> bool {
    let points = dedup(points);
    let candidate = dedup(candidate);
    if candidate.is_empty() || !candidate.iter().all(|c| points.contains(c)) {
        return false;
    }
    let n = points[0].len();
    // unknowns: c (n entries), then the level v
    let row = |p: &LatticePoint| {
        let mut r = to_q(p);
        r.push(-Rational::one());
        r
    };
    let cs: Vec<LinearConstraint> = points
        .iter()
        .map(|p| {
            let rel = if candidate.contains(p) { Relation::Eq } else { Relation::Gt };
            LinearConstraint::new(row(p), rel, Rational::zero())
        })
        .collect();
    lp_feasible(n + 1, &cs).is_feasible()
}
