//! Newton polyhedra at infinity: convenience, bad faces, face tuples,
//! non-degeneracy verdicts and the outer bound `Σ(F)`.

mod bad;
mod sigma;
mod torus;
mod tuples;

use serde::Serialize;

use crate::latgeom::{enumerate_faces, hull_vertices, Face, LatticePoint, LatticePolytope};
use crate::poly::{PolyError, SparsePoly};

pub use bad::{bad_faces, is_bad_face};
pub use sigma::{sigma, sigma_infinity, Hyperplane, SigmaOptions, SigmaReport};
pub use torus::{check_nondegenerate, Certificate, DegeneracyVerdict, NondegOptions, VerdictStatus};
pub use tuples::{face_tuples_at_infinity, FaceTuple, GammaInfReading};

/// Newton polyhedron data of a single polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct NewtonData {
    #[serde(serialize_with = "serialize_poly")]
    pub poly: SparsePoly,
    /// `conv({0} ∪ supp f)`
    #[serde(skip)]
    pub gamma_minus: LatticePolytope,
    /// `conv(supp f)`
    #[serde(skip)]
    pub supp_hull: LatticePolytope,
    pub faces_at_infinity: Vec<Face>,
    pub bad_faces: Vec<Face>,
    pub convenient: bool,
}

fn serialize_poly<S: serde::Serializer>(p: &SparsePoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// `Γ₋(f)`: hull of the support together with the origin.
pub fn gamma_minus(f: &SparsePoly) -> LatticePolytope {
    let mut pts = f.support_points();
    pts.push(vec![0; f.nvars()]);
    hull_vertices(&pts)
}

/// Builds the Newton data of `f`.
pub fn analyze(f: &SparsePoly) -> Result<NewtonData, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let gamma = gamma_minus(f);
    let supp_hull = hull_vertices(&f.support_points());
    let faces_at_infinity = enumerate_faces(&gamma).into_iter().filter(|face| !face.contains_origin()).collect();
    Ok(NewtonData {
        poly: f.clone(),
        gamma_minus: gamma,
        supp_hull,
        faces_at_infinity,
        bad_faces: bad_faces(f),
        convenient: is_convenient(f),
    })
}

/// The support meets every coordinate axis away from the origin.
pub fn is_convenient(f: &SparsePoly) -> bool {
    let pts = f.support_points();
    (0..f.nvars()).all(|i| pts.iter().any(|p| on_axis(p, i)))
}

fn on_axis(p: &LatticePoint, i: usize) -> bool {
    p[i] > 0 && p.iter().enumerate().all(|(j, &x)| j == i || x == 0)
}

/// Exact check of `Σ p_i x_i ∂f_Δ/∂x_i = d · f_Δ`, the weighted Euler
/// relation of a face polynomial.
pub fn weighted_euler_check(f: &SparsePoly, face: &Face) -> Result<bool, PolyError> {
    let fd = f.face_restriction(face)?;
    let mut lhs = SparsePoly::zero(f.nvars());
    for (i, p) in face.normal.0.iter().enumerate() {
        lhs = lhs.add(&fd.partial(i)?.mul_var(i).scale(p));
    }
    Ok(lhs == fd.scale(&face.value))
}
