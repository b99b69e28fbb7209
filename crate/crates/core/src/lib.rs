//! Exact-arithmetic toolkit for truncated p-adic power series rings.
//!
//! The crate provides fixed-precision `l`-adic scalars, sparse truncated
//! multivariate power series with the `t`/`x` logarithmic coordinate change,
//! Weierstrass division and preparation, a diagonal Frobenius action with unit
//! trivialization and eigen-homogenization, linearization of equivariant prime
//! ideals onto one-variable evaluation maps, finite-precision characters, and
//! exact-field Koszul/Tor computations with support checks.
//!
//! See the `book/` directory for a guided tour; every snippet there runs as a
//! doc-test of this crate.

pub mod characters;
pub mod coeff;
pub mod error;
pub mod exact;
pub mod frobenius;
pub mod homology;
pub mod linearize;
pub mod series;
pub mod weierstrass;

pub use characters::Character;
pub use coeff::{Context, PadicScalar};
pub use error::{Error, Result};
pub use frobenius::FrobeniusAction;
pub use homology::{CohomologyProfile, FreeComplex, ModulePresentation};
pub use linearize::{EvaluationMap, IdealPresentation, RingFlavor};
pub use series::{Coords, Monomial, MultiSeries};
pub use weierstrass::{DivisionResult, WeierstrassFactorization};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/weierstrass.md")]
    mod weierstrass {}
    #[doc = include_str!("../../../book/src/frobenius.md")]
    mod frobenius {}
    #[doc = include_str!("../../../book/src/linearization.md")]
    mod linearization {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/homology.md")]
    mod homology {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
