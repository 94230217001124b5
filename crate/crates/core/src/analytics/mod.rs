//! Closed-form quantities and non-asymptotic bounds.
//!
//! Everything that can overflow or underflow is carried in natural-log
//! space; the alternating inclusion–exclusion sums run in software
//! floating point (see [`DEFAULT_PRECISION_BITS`]).

mod first_moment;
mod poisson;
mod second_moment;

pub use first_moment::{
    ln_tau, log_expected_dom_sets, r_hat, r_zero, tau, threshold_margin, ModelParams, RHat, TIE_EPS,
};
pub use poisson::{
    exact_mutual_dom_prob, exact_no_isolated_prob, poisson_bounds, poisson_params, HighPrecProb,
    PoissonBounds, PoissonMode, PoissonParams, DEFAULT_PRECISION_BITS, RECHECK_TOLERANCE,
};
pub use second_moment::{
    overlap_term_u, rho_bounds, rho_exact, tail_bounds, variance_exact, OverlapProfile, RhoBounds,
    RhoMode, TailBounds, VarianceProfile,
};
