//! Exact computation of elements of multivariate Bernstein-Sato ideals and
//! structural checks on their zero loci.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod snc;
pub mod solver;
pub mod torus;
pub mod weyl;

pub use error::{Error, Result};

// The guide's snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/weyl.md")]
    mod weyl {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/hyperplanes.md")]
    mod hyperplanes {}
    #[doc = include_str!("../../../book/src/snc.md")]
    mod snc {}
    #[doc = include_str!("../../../book/src/torus.md")]
    mod torus {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
