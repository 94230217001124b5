//! Poisson-type sandwich bounds for the probability that no vertex is
//! isolated, and the exact inclusion–exclusion oracles they are checked
//! against.
//!
//! Both oracles reduce to the same sum. With `m` vertices on each side of
//! a bipartite "must reach the other side" structure in which every vertex
//! has `r` potential partners (and the two sides share `m²` cross pairs),
//!
//! ```text
//! Pr(no failure) = Σ_{i,j} (-1)^{i+j} C(m,i) C(m,j) q^{(i+j) r - i j}
//!                = Σ_i (-1)^i C(m,i) q^{i r} (1 - q^{r-i})^m
//! ```
//!
//! where `q = 1 - p`. The second line sums out `j` with the binomial
//! theorem. It alternates, so it is evaluated in software floating point
//! and re-evaluated at twice the precision as a guard.

use astro_float::BigFloat;
use serde::Serialize;

use crate::error::{check_probability, Error, Result};
use crate::hp::{self, Prec};
use crate::special::{ln_q, pow_q};

/// Default working precision for the inclusion–exclusion oracles.
pub const DEFAULT_PRECISION_BITS: usize = 256;

/// Relative agreement required between the two precisions.
pub const RECHECK_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PoissonMode {
    /// Isolated vertices of `G(N,N,p)`.
    Bipartite { n_side: u64 },
    /// Vertices of `A △ B` not dominated by the other set, for two
    /// `r`-sets with `|A ∩ B| = s`.
    Overlap { r: u64, s: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonParams {
    pub mode: PoissonMode,
    /// `N` in bipartite mode, `r - s` in overlap mode.
    pub n_eff: u64,
    pub p: f64,
    pub mu: f64,
    pub delta: f64,
    pub pi_w: f64,
    pub delta_v: f64,
    /// `Δp/μ`, zero when `μ = 0`.
    pub sigma: f64,
}

impl PoissonParams {
    /// Probability `π_v = Π_w (1-p)` that a single vertex is bad.
    pub fn pi_v(&self) -> f64 {
        self.pi_w * (1.0 - self.p)
    }
}

/// ```
/// use domlab::analytics::{poisson_params, PoissonMode};
/// let pp = poisson_params(PoissonMode::Bipartite { n_side: 2 }, 0.5).unwrap();
/// assert!((pp.mu - 1.0).abs() < 1e-15 && (pp.sigma - 0.5).abs() < 1e-15);
/// ```
pub fn poisson_params(mode: PoissonMode, p: f64) -> Result<PoissonParams> {
    check_probability("p", p)?;
    // m vertices per side, each needing one of r edges.
    let (m, r) = match mode {
        PoissonMode::Bipartite { n_side } => {
            if n_side == 0 {
                return Err(Error::validation("N", "bipartite side must be at least 1"));
            }
            (n_side, n_side)
        }
        PoissonMode::Overlap { r, s } => {
            if s > r {
                return Err(Error::validation("s", format!("s = {s} exceeds r = {r}")));
            }
            (r - s, r)
        }
    };
    let lq = ln_q(p);
    let mf = m as f64;
    let rf = r as f64;
    let mu = 2.0 * mf * pow_q(lq, rf);
    let delta = if m == 0 {
        0.0
    } else {
        2.0 * mf * mf * pow_q(lq, 2.0 * rf - 1.0)
    };
    let pi_w = pow_q(lq, (rf - 1.0).max(0.0));
    let delta_v = mf * pi_w;
    let sigma = if mu > 0.0 { delta * p / mu } else { 0.0 };
    Ok(PoissonParams {
        mode,
        n_eff: m,
        p,
        mu,
        delta,
        pi_w,
        delta_v,
        sigma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonBounds {
    /// `exp(-μ + Δp ln(1 + μ/(Δp)))`.
    pub upper: f64,
    /// `exp(-μ - μ²/(2N))`; present only when `π_v <= 1/2`.
    pub lower_exp: Option<f64>,
    /// `(1 - π_v)^(2N)`; present only when `π_v <= 1/2`.
    pub lower_fkg: Option<f64>,
    /// `-μ + Δ/2`, the classical Janson exponent, for comparison.
    pub janson_exponent: f64,
}

/// Upper and lower bounds on `Pr(X = 0)`.
///
/// The exponential lower bound carries a minus sign on `μ²/(2N)`; it is
/// what the product `Π (1 - π_v) >= exp(-Σ π_v (1 + π_v))` gives. With a
/// plus sign the bound would fail already at `N = 1, p = 1/2`, where it
/// reads `e^{-1/2} ≈ 0.607` against the exact value `0.5`.
pub fn poisson_bounds(params: &PoissonParams) -> PoissonBounds {
    let PoissonParams {
        mu,
        delta,
        p,
        n_eff,
        ..
    } = *params;
    if mu == 0.0 {
        return PoissonBounds {
            upper: 1.0,
            lower_exp: Some(1.0),
            lower_fkg: Some(1.0),
            janson_exponent: 0.5 * delta,
        };
    }
    let dp = delta * p;
    let upper = if dp == 0.0 {
        (-mu).exp()
    } else {
        (-mu + dp * (mu / dp).ln_1p()).exp()
    };
    let pi_v = params.pi_v();
    let (lower_exp, lower_fkg) = if pi_v <= 0.5 {
        let two_n = 2.0 * n_eff as f64;
        (
            Some((-mu - mu * mu / two_n).exp()),
            Some((two_n * (-pi_v).ln_1p()).exp()),
        )
    } else {
        (None, None)
    };
    PoissonBounds {
        upper,
        lower_exp,
        lower_fkg,
        janson_exponent: -mu + 0.5 * delta,
    }
}

/// A probability computed in software floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighPrecProb {
    pub value: f64,
    pub precision_bits: usize,
    /// The recomputation at twice the precision agreed to
    /// [`RECHECK_TOLERANCE`].
    pub verified: bool,
}

/// `Σ_i (-1)^i C(m,i) q^{ir} (1 - q^{r-i})^m` at precision `prec`.
pub(crate) fn inclusion_exclusion(m: u64, r: u64, q: &BigFloat, prec: Prec) -> BigFloat {
    let qpow = prec.power_table(q, r as usize);
    inclusion_exclusion_with(m, r, &qpow, prec)
}

/// As [`inclusion_exclusion`], reusing a table holding at least
/// `q^0, ..., q^r`.
pub(crate) fn inclusion_exclusion_with(m: u64, r: u64, qpow: &[BigFloat], prec: Prec) -> BigFloat {
    debug_assert!(m <= r && qpow.len() > r as usize);
    let one = prec.one();
    let qr = &qpow[r as usize];
    let mut binom = prec.one();
    let mut qir = prec.one();
    let mut pos = prec.zero();
    let mut neg = prec.zero();
    for i in 0..=m {
        let inner = prec.sub(&one, &qpow[(r - i) as usize]);
        let term = prec.mul(&prec.mul(&binom, &qir), &prec.powi(&inner, m));
        if i % 2 == 0 {
            pos = prec.add(&pos, &term);
        } else {
            neg = prec.add(&neg, &term);
        }
        binom = prec.div(&prec.mul(&binom, &prec.int(m - i)), &prec.int(i + 1));
        qir = prec.mul(&qir, qr);
    }
    prec.sub(&pos, &neg)
}

pub(crate) fn one_minus(p: f64, prec: Prec) -> BigFloat {
    prec.sub(&prec.one(), &prec.f64(p))
}

/// Evaluate `f` at `bits` and `2 * bits`; fail unless both agree.
pub(crate) fn verified<F>(bits: usize, f: F) -> Result<(BigFloat, f64)>
where
    F: Fn(Prec) -> BigFloat,
{
    check_bits(bits)?;
    let hi = f(Prec(2 * bits));
    agree(&f(Prec(bits)), &hi, bits)?;
    let v = hp::to_f64(&hi);
    Ok((hi, v))
}

pub(crate) fn check_bits(bits: usize) -> Result<()> {
    if bits < 64 {
        return Err(Error::validation(
            "precision-bits",
            format!("{bits} bits is below the minimum of 64"),
        ));
    }
    Ok(())
}

/// `lo` (at `bits`) and `hi` (at `2 * bits`) agree to [`RECHECK_TOLERANCE`].
pub(crate) fn agree(lo: &BigFloat, hi: &BigFloat, bits: usize) -> Result<()> {
    let ok = if hi.is_zero() {
        lo.is_zero()
    } else {
        let wide = Prec(2 * bits);
        let rel = wide.div(&wide.sub(lo, hi), hi);
        hp::to_f64(&rel).abs() <= RECHECK_TOLERANCE
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NumericInstability {
            value: hp::to_f64(lo),
            bits,
            check: hp::to_f64(hi),
            check_bits: 2 * bits,
        })
    }
}

fn prob(value: f64, bits: usize) -> HighPrecProb {
    HighPrecProb {
        value: value.clamp(0.0, 1.0),
        precision_bits: bits,
        verified: true,
    }
}

/// Exact `Pr(no isolated vertex)` in `G(N,N,p)`.
///
/// ```
/// let pr = domlab::analytics::exact_no_isolated_prob(2, 0.5, 256).unwrap();
/// assert!((pr.value - 0.4375).abs() < 1e-15);
/// ```
pub fn exact_no_isolated_prob(n_side: u64, p: f64, precision_bits: usize) -> Result<HighPrecProb> {
    check_probability("p", p)?;
    let (_, v) = verified(precision_bits, |prec| {
        inclusion_exclusion(n_side, n_side, &one_minus(p, prec), prec)
    })?;
    Ok(prob(v, precision_bits))
}

/// Exact probability that two `r`-sets sharing `s` vertices dominate each
/// other (every vertex of `B \ A` has a neighbor in `A` and vice versa).
/// Only edges inside `A ∪ B` matter, so `n` does not enter.
pub fn exact_mutual_dom_prob(
    r: u64,
    s: u64,
    p: f64,
    precision_bits: usize,
) -> Result<HighPrecProb> {
    check_probability("p", p)?;
    if s > r {
        return Err(Error::validation("s", format!("s = {s} exceeds r = {r}")));
    }
    let (_, v) = verified(precision_bits, |prec| {
        inclusion_exclusion(r - s, r, &one_minus(p, prec), prec)
    })?;
    Ok(prob(v, precision_bits))
}
