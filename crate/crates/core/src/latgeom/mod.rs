//! Exact lattice-polytope geometry: convex hull vertices, supporting
//! covectors and complete face lattices, all over the rationals.

pub(crate) mod exact;
mod lp;
mod polytope;

pub use lp::{lp_feasible, LinearConstraint, LpOutcome, Relation};
pub use polytope::{
    affine_dim, enumerate_faces, hull_vertices, is_face_oracle, minimizing_face, Covector, Face, LatticePoint,
    LatticePolytope,
};
