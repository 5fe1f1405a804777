pub mod asymptotic;
pub mod cloud;
pub mod newton;
pub mod latgeom;
pub mod linalg;
pub mod poly;
pub mod sampler;
pub mod scalar;
pub mod trivialize;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/newton.md")]
    mod newton {}
    #[doc = include_str!("../../../book/src/sigma.md")]
    mod sigma {}
    #[doc = include_str!("../../../book/src/asymptotic.md")]
    mod asymptotic {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
}
