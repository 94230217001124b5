//! Exact formulas, non-asymptotic bounds, enumeration oracles and seeded
//! Monte Carlo experiments for the domination number of `G(n,p)`.
//!
//! - [`analytics`]: `τ`, `E X_r`, the threshold `r̂`, Poisson bounds,
//!   exact inclusion–exclusion oracles, `ρ(s)`, `Var X_r`, tail bounds.
//! - [`graph`], [`domination`]: bitset graphs, `G(n,p)` sampling and an
//!   exact domination-number solver.
//! - [`coupling`]: maximal coupling of `G(n,p)` with `G(n,q)`.
//! - [`harness`], [`cli`]: reproducible parallel experiments with CSV
//!   output.
//!
//! The guide in `book/` walks through each piece; its code blocks are
//! compiled as doctests.

pub mod analytics;
pub mod bits;
pub mod cli;
pub mod coupling;
pub mod domination;
pub mod error;
pub mod graph;
pub mod harness;
pub(crate) mod hp;
pub mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/first-moment.md")]
    mod first_moment {}
    #[doc = include_str!("../../../book/src/poisson.md")]
    mod poisson {}
    #[doc = include_str!("../../../book/src/second-moment.md")]
    mod second_moment {}
    #[doc = include_str!("../../../book/src/coupling.md")]
    mod coupling {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
