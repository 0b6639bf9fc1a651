//! Exact tropicalization of Poisson brackets whose coefficients are Laurent
//! polynomials, with the dual Poisson-Lie group of `U(n)` in solid-minor
//! coordinates as the worked example.

pub mod arith;
pub mod error;
pub mod format;
pub mod groups;
pub mod gz;
pub mod networks;
pub mod poisson;
pub mod polyhedra;
pub mod rmatrix;
pub mod tropical;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bracket-files.md")]
    mod bracket_files {}
    #[doc = include_str!("../../../book/src/tropicalizing.md")]
    mod tropicalizing {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/gelfand-zeitlin.md")]
    mod gelfand_zeitlin {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
