use num_traits::Zero;
use serde::Serialize;

use super::gamma_minus;
use crate::latgeom::{enumerate_faces, lp_feasible, minimizing_face, Covector, Face, LinearConstraint, LpOutcome, Relation};
use crate::poly::PolyMap;
use crate::scalar::{rat, Rational};

/// Which tuples `Δ(P;F)` count as lying at infinity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaInfReading {
    /// some component face avoids the origin
    #[default]
    Exists,
    /// every component face avoids the origin
    Forall,
}

impl std::str::FromStr for GammaInfReading {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exists" => Ok(Self::Exists),
            "forall" => Ok(Self::Forall),
            other => Err(format!("unknown reading `{other}` (expected exists or forall)")),
        }
    }
}

impl GammaInfReading {
    pub fn admits(self, faces: &[Face]) -> bool {
        match self {
            Self::Exists => faces.iter().any(|f| !f.contains_origin()),
            Self::Forall => faces.iter().all(|f| !f.contains_origin()),
        }
    }
}

/// `Δ(P;F) = (Δ(P;F_1), …, Δ(P;F_m))` with the covector realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceTuple {
    pub faces: Vec<Face>,
    #[serde(serialize_with = "serialize_witness")]
    pub witness: Option<Covector>,
}

fn serialize_witness<S: serde::Serializer>(w: &Option<Covector>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(c) => s.collect_seq(c.to_strings()),
        None => s.serialize_none(),
    }
}

/// All tuples of faces of `Γ₋(F_i)` minimized by one common covector and
/// admitted by `reading`. Tuples come in lexicographic order of the
/// per-component face lists, each face carrying the common covector.
pub fn face_tuples_at_infinity(f: &PolyMap, reading: GammaInfReading) -> Vec<FaceTuple> {
    let polys: Vec<_> = f.components().iter().map(gamma_minus).collect();
    let face_lists: Vec<Vec<Face>> = polys.iter().map(enumerate_faces).collect();
    let n = f.nvars();
    let m = f.ncomponents();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    if face_lists.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let choice: Vec<&Face> = idx.iter().zip(&face_lists).map(|(&k, l)| &l[k]).collect();
        let owned: Vec<Face> = choice.iter().map(|&f| f.clone()).collect();
        if reading.admits(&owned) {
            if let Some(p) = common_covector(n, &polys, &choice) {
                let faces = polys.iter().map(|poly| minimizing_face(poly, &p)).collect();
                out.push(FaceTuple { faces, witness: Some(p) });
            }
        }
        // odometer
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < face_lists[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Unknowns `(P, d_1, …, d_m)`: `P·α = d_i` on `Δ_i`, `P·β > d_i` on the
/// other generators of `Γ₋(F_i)`.
fn common_covector(n: usize, polys: &[crate::latgeom::LatticePolytope], faces: &[&Face]) -> Option<Covector> {
    let m = faces.len();
    let mut cs = Vec::new();
    for (i, (poly, face)) in polys.iter().zip(faces).enumerate() {
        for g in &poly.generators {
            let mut row: Vec<Rational> = g.iter().map(|&x| rat(x)).collect();
            row.resize(n + m, Rational::zero());
            row[n + i] = rat(-1);
            let rel = if face.contains(g) { Relation::Eq } else { Relation::Gt };
            cs.push(LinearConstraint::new(row, rel, Rational::zero()));
        }
    }
    match lp_feasible(n + m, &cs) {
        LpOutcome::Feasible(x) => Some(Covector(x[..n].to_vec()).to_integral()),
        LpOutcome::Infeasible => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbola() -> PolyMap {
        PolyMap::parse(&["x*y - 1", "y^2*z"], &["x", "y", "z"]).unwrap()
    }

    fn sets(t: &FaceTuple) -> Vec<Vec<Vec<i64>>> {
        t.faces.iter().map(|f| f.points.clone()).collect()
    }

    #[test]
    fn tuples_of_hyperbola_map() {
        let tuples = face_tuples_at_infinity(&hyperbola(), GammaInfReading::Exists);
        let all: Vec<_> = tuples.iter().map(sets).collect();
        assert!(all.contains(&vec![vec![vec![1, 1, 0]], vec![vec![0, 2, 1]]]));
        assert!(all.contains(&vec![vec![vec![0, 0, 0]], vec![vec![0, 2, 1]]]));
        for t in &tuples {
            let p = t.witness.as_ref().unwrap();
            for (face, comp) in t.faces.iter().zip(hyperbola().components()) {
                assert_eq!(face, &minimizing_face(&gamma_minus(comp), p));
            }
            assert!(t.faces.iter().any(|f| !f.contains_origin()));
        }
        let strict = face_tuples_at_infinity(&hyperbola(), GammaInfReading::Forall);
        assert!(strict.len() < tuples.len());
        assert!(strict.iter().all(|t| t.faces.iter().all(|f| !f.contains_origin())));
    }

    #[test]
    fn covector_examples_realize_expected_tuples() {
        let f = hyperbola();
        let polys: Vec<_> = f.components().iter().map(gamma_minus).collect();
        let faces = |p: &[i64]| -> Vec<Vec<Vec<i64>>> {
            polys.iter().map(|g| minimizing_face(g, &Covector::from_ints(p)).points).collect()
        };
        assert_eq!(faces(&[-1, -1, -1]), vec![vec![vec![1, 1, 0]], vec![vec![0, 2, 1]]]);
        // (1,1,1) is positive on (0,2,1), so the origin wins in both components
        assert_eq!(faces(&[1, 1, 1]), vec![vec![vec![0, 0, 0]], vec![vec![0, 0, 0]]]);
        assert_eq!(faces(&[3, 0, -1]), vec![vec![vec![0, 0, 0]], vec![vec![0, 2, 1]]]);
    }

    #[test]
    fn single_component_tuples_are_faces_at_infinity() {
        let f = PolyMap::parse(&["x + x^2*y"], &["x", "y"]).unwrap();
        let tuples = face_tuples_at_infinity(&f, GammaInfReading::Exists);
        let got: Vec<_> = tuples.iter().map(|t| t.faces[0].points.clone()).collect();
        assert_eq!(got, vec![vec![vec![1, 0]], vec![vec![2, 1]], vec![vec![1, 0], vec![2, 1]]]);
    }

    #[test]
    fn parses_reading() {
        assert_eq!("forall".parse::<GammaInfReading>(), Ok(GammaInfReading::Forall));
        assert!("some".parse::<GammaInfReading>().is_err());
    }
}
