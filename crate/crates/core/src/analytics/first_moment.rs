//! Domination probability, the expected number of dominating `r`-sets and
//! the expectation threshold `r̂`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{ln_binomial, ln_q, pow_q};

/// Log-margins closer to zero than this are treated as exact ties and
/// resolved in favour of `>=`.
pub const TIE_EPS: f64 = 1e-12;

/// An `(n, p)` pair in the range the threshold quantities are defined on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub n: u64,
    pub p: f64,
}

impl ModelParams {
    /// Requires `n >= 2`, `0 < p < 1` and `np > 1`.
    pub fn new(n: u64, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation(
                "n",
                format!("n = {n} must be at least 2"),
            ));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::validation("p", format!("{p} is not in (0, 1)")));
        }
        if n as f64 * p <= 1.0 {
            return Err(Error::Domain(format!(
                "np = {} must exceed 1",
                n as f64 * p
            )));
        }
        Ok(ModelParams { n, p })
    }

    pub fn np(&self) -> f64 {
        self.n as f64 * self.p
    }
}

/// `ln τ` with `τ = (1 - (1-p)^r)^(n-r)`; `-inf` when `τ = 0`.
///
/// # Panics
/// If `r > n`.
pub fn ln_tau(n: u64, p: f64, r: u64) -> f64 {
    assert!(r <= n, "r = {r} exceeds n = {n}");
    if r == n {
        return 0.0;
    }
    let qr = pow_q(ln_q(p), r as f64);
    (n - r) as f64 * (-qr).ln_1p()
}

/// Probability that a fixed `r`-set dominates `G(n,p)`.
///
/// ```
/// assert!((domlab::analytics::tau(4, 0.5, 1) - 0.125).abs() < 1e-15);
/// assert_eq!(domlab::analytics::tau(9, 0.3, 9), 1.0);
/// ```
pub fn tau(n: u64, p: f64, r: u64) -> f64 {
    ln_tau(n, p, r).exp()
}

/// `ln E[X_r] = ln C(n,r) + ln τ`.
pub fn log_expected_dom_sets(n: u64, p: f64, r: u64) -> f64 {
    let lt = ln_tau(n, p, r);
    if lt == f64::NEG_INFINITY {
        return lt;
    }
    ln_binomial(n, r) + lt
}

/// `ln E[X_r] + ln(np)`: nonnegative (up to [`TIE_EPS`]) exactly when
/// `E[X_r] >= 1/(np)`.
pub fn threshold_margin(n: u64, p: f64, r: u64) -> f64 {
    log_expected_dom_sets(n, p, r) + (n as f64 * p).ln()
}

fn reaches_threshold(n: u64, p: f64, r: u64) -> bool {
    threshold_margin(n, p, r) >= -TIE_EPS
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RHat {
    pub r_hat: u64,
    /// `(ln(np) - 2 ln ln(np)) / p`, the first-order prediction of `r̂`.
    pub predictor: f64,
    /// `ln E[X_{r̂-1}]`.
    pub ln_expected_below: f64,
    /// `ln E[X_{r̂}]`.
    pub ln_expected_at: f64,
}

/// Smallest `r` with `E[X_r] >= 1/(np)`.
///
/// `E[X_r]` is nondecreasing on `r <= ceil(n/2)` (both `C(n,r)` and `τ`
/// grow there), so the threshold is bracketed by doubling and located by
/// bisection on that range; past it a linear scan finishes the job, which
/// only happens for tiny `n`.
///
/// ```
/// let rh = domlab::analytics::r_hat(4, 0.5).unwrap();
/// assert_eq!(rh.r_hat, 1);
/// ```
pub fn r_hat(n: u64, p: f64) -> Result<RHat> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation("p", format!("{p} is not in [0, 1]")));
    }
    let np = n as f64 * p;
    if np <= 1.0 {
        return Err(Error::Domain(format!("np = {np} must exceed 1")));
    }
    let mid = n.div_ceil(2);
    let found = if reaches_threshold(n, p, mid) {
        // E X_0 = 0 for n >= 1, so the answer is at least 1.
        let mut lo = 0u64;
        let mut hi = 1u64;
        while !reaches_threshold(n, p, hi) {
            lo = hi;
            hi = (hi * 2).min(mid);
        }
        while hi - lo > 1 {
            let m = lo + (hi - lo) / 2;
            if reaches_threshold(n, p, m) {
                hi = m;
            } else {
                lo = m;
            }
        }
        hi
    } else {
        (mid + 1..=n)
            .find(|&r| reaches_threshold(n, p, r))
            .unwrap_or(n)
    };
    let lnp = np.ln();
    Ok(RHat {
        r_hat: found,
        predictor: (lnp - 2.0 * lnp.ln()) / p,
        ln_expected_below: log_expected_dom_sets(n, p, found - 1),
        ln_expected_at: log_expected_dom_sets(n, p, found),
    })
}

/// Cutoff `r₀ = floor(r² ln(np) / n)`; zero when `np <= 1`.
pub fn r_zero(n: u64, p: f64, r: u64) -> u64 {
    let lnp = (n as f64 * p).ln();
    if n == 0 || lnp <= 0.0 {
        return 0;
    }
    let x = (r as f64) * (r as f64) * lnp / n as f64;
    x.floor() as u64
}
