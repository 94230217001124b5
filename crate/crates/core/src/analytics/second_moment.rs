//! Pair probabilities `ρ(s)`, the overlap terms `u_s`, the exact variance
//! of `X_r` and the resulting tail bounds on `γ`.
//!
//! For two `r`-sets `A`, `B` with `|A ∩ B| = s`, the event that both
//! dominate splits over disjoint edge sets: every vertex outside `A ∪ B`
//! needs a neighbor in `A` and one in `B` (probability
//! `1 - 2q^r + q^{2r-s}` each, independently), and the vertices of `A △ B`
//! must be dominated across, which is the mutual-domination probability.

use astro_float::BigFloat;
use serde::Serialize;

use super::first_moment::{ln_tau, log_expected_dom_sets, r_hat, r_zero, RHat};
use super::poisson::{
    agree, check_bits, inclusion_exclusion, inclusion_exclusion_with, one_minus, poisson_bounds,
    poisson_params, verified, HighPrecProb, PoissonMode, DEFAULT_PRECISION_BITS,
};
use crate::error::{check_probability, Error, Result};
use crate::hp::{self, Prec};
use crate::special::{ln_binomial, ln_q, pow_q};

fn check_overlap(n: u64, p: f64, r: u64, s: u64) -> Result<()> {
    check_probability("p", p)?;
    if s > r {
        return Err(Error::validation("s", format!("s = {s} exceeds r = {r}")));
    }
    if 2 * r - s > n {
        return Err(Error::validation(
            "r",
            format!("two {r}-sets sharing {s} vertices do not fit in n = {n}"),
        ));
    }
    Ok(())
}

/// `ln(1 - 2q^r + q^{2r-s})`, the log-probability that one outside vertex
/// is dominated by both sets.
fn ln_outside_base(p: f64, r: u64, s: u64) -> f64 {
    let lq = ln_q(p);
    let qr = pow_q(lq, r as f64);
    let d = pow_q(lq, (2 * r - s) as f64) - 2.0 * qr;
    if d > -0.5 {
        d.ln_1p()
    } else {
        // Here q^r >= 1/4, so ln q is finite: base = (1-q^r)² + q^{2r}(q^{-s} - 1).
        let a = 1.0 - qr;
        (a * a + qr * qr * (-(s as f64) * lq).exp_m1()).ln()
    }
}

fn pow_from_ln(exponent: u64, ln_base: f64) -> f64 {
    if exponent == 0 {
        1.0
    } else {
        (exponent as f64 * ln_base).exp()
    }
}

fn ln_pow(exponent: u64, ln_base: f64) -> f64 {
    if exponent == 0 {
        0.0
    } else {
        exponent as f64 * ln_base
    }
}

fn mutual_dom_big(r: u64, s: u64, p: f64, bits: usize) -> Result<BigFloat> {
    let (v, _) = verified(bits, |prec| {
        inclusion_exclusion(r - s, r, &one_minus(p, prec), prec)
    })?;
    Ok(v)
}

fn ln_rho(n: u64, p: f64, r: u64, s: u64, bits: usize) -> Result<(f64, BigFloat)> {
    let mutual = mutual_dom_big(r, s, p, bits)?;
    let ln_out = ln_pow(n + s - 2 * r, ln_outside_base(p, r, s));
    Ok((ln_out + hp::ln(&mutual), mutual))
}

/// Probability `ρ(s)` that two fixed `r`-sets sharing `s` vertices both
/// dominate `G(n,p)`.
///
/// ```
/// let rho = domlab::analytics::rho_exact(4, 0.5, 1, 0, 256).unwrap();
/// assert!((rho.value - 0.03125).abs() < 1e-15);
/// ```
pub fn rho_exact(n: u64, p: f64, r: u64, s: u64, precision_bits: usize) -> Result<HighPrecProb> {
    check_overlap(n, p, r, s)?;
    let mutual = mutual_dom_big(r, s, p, precision_bits)?;
    let outside = pow_from_ln(n + s - 2 * r, ln_outside_base(p, r, s));
    Ok(HighPrecProb {
        value: (outside * hp::to_f64(&mutual)).clamp(0.0, 1.0),
        precision_bits,
        verified: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoBounds {
    /// Outside factor alone: `(1 - 2q^r + q^{2r-s})^{n-2r+s}`.
    pub simple: f64,
    /// Outside factor times the Poisson upper bound in overlap mode.
    pub composite: f64,
    /// `(1 - 2q^r + q^{2r-s})^{n-r}`; diagnostic only.
    pub improved_base: f64,
    /// `max(0, 1 - 2q^r)^{r-s}`; diagnostic only.
    pub mutual_lemma_base: f64,
}

/// Closed-form companions of `ρ(s)`. `simple` and `composite` are upper
/// bounds; the other two drop a `1 + o(1)` factor and are not bounds.
pub fn rho_bounds(n: u64, p: f64, r: u64, s: u64) -> Result<RhoBounds> {
    check_overlap(n, p, r, s)?;
    let lb = ln_outside_base(p, r, s);
    let simple = pow_from_ln(n + s - 2 * r, lb);
    let upper = poisson_bounds(&poisson_params(PoissonMode::Overlap { r, s }, p)?).upper;
    let qr = pow_q(ln_q(p), r as f64);
    let lemma = (1.0 - 2.0 * qr).max(0.0);
    Ok(RhoBounds {
        simple,
        composite: simple * upper,
        improved_base: pow_from_ln(n - r, lb),
        mutual_lemma_base: if r == s {
            1.0
        } else {
            lemma.powf((r - s) as f64)
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMode {
    Exact,
    Simple,
    Composite,
}

/// `u_s = [C(r,s) C(n-r,r-s) / C(n,r)] · ρ(s) / τ²`, with `ρ` exact or
/// replaced by one of its upper bounds. Requires `E[X_r] > 0`.
///
/// ```
/// use domlab::analytics::{overlap_term_u, RhoMode};
/// let u = overlap_term_u(4, 0.5, 1, 0, RhoMode::Exact).unwrap();
/// assert!((u - 1.5).abs() < 1e-12);
/// ```
pub fn overlap_term_u(n: u64, p: f64, r: u64, s: u64, mode: RhoMode) -> Result<f64> {
    check_overlap(n, p, r, s)?;
    let lt = ln_tau(n, p, r);
    if lt == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("E X_{r} = 0 at n = {n}, p = {p}")));
    }
    let ln_rho = match mode {
        RhoMode::Exact => ln_rho(n, p, r, s, DEFAULT_PRECISION_BITS)?.0,
        RhoMode::Simple => ln_pow(n + s - 2 * r, ln_outside_base(p, r, s)),
        RhoMode::Composite => {
            let b = rho_bounds(n, p, r, s)?;
            b.composite.ln()
        }
    };
    let ln_count = ln_binomial(r, s) + ln_binomial(n - r, r - s) - ln_binomial(n, r);
    Ok((ln_count + ln_rho - 2.0 * lt).exp())
}

/// One overlap size in the variance decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapProfile {
    pub s: u64,
    /// `ln[C(n,r) C(r,s) C(n-r,r-s)]`, the log number of ordered pairs.
    pub ln_pair_count: f64,
    pub rho: f64,
    pub ln_rho: f64,
    pub simple_bound: f64,
    pub composite_bound: f64,
    pub improved_base: f64,
    pub mutual_lemma_base: f64,
    pub u_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceProfile {
    pub n: u64,
    pub p: f64,
    pub r: u64,
    pub r0: u64,
    /// `E[X_r]`.
    pub expected: f64,
    pub var: f64,
    pub ln_var: f64,
    /// `Var X_r / E[X_r]²`.
    pub ratio: f64,
    /// `Σ_{s <= r₀} pairs(s) (ρ(s) - τ²)`.
    pub v1: f64,
    /// `Σ_{s > r₀} pairs(s) ρ(s)`.
    pub v2: f64,
    pub per_s: Vec<OverlapProfile>,
    pub precision_bits: usize,
    pub verified: bool,
}

struct Moments {
    var: BigFloat,
    v1: BigFloat,
    v2: BigFloat,
    expected: BigFloat,
    pairs: Vec<BigFloat>,
    rho: Vec<BigFloat>,
}

fn moments(n: u64, p: f64, r: u64, r0: u64, s_min: u64, prec: Prec) -> Moments {
    let q = one_minus(p, prec);
    let qpow = prec.power_table(&q, 2 * r as usize);
    let one = prec.one();
    let tau = prec.powi(&prec.sub(&one, &qpow[r as usize]), n - r);
    let tau2 = prec.mul(&tau, &tau);
    let c_nr = prec.binomial(n, r);
    let mut m = Moments {
        var: prec.zero(),
        v1: prec.zero(),
        v2: prec.zero(),
        expected: prec.mul(&c_nr, &tau),
        pairs: Vec::new(),
        rho: Vec::new(),
    };
    let two_qr = prec.mul(&prec.int(2), &qpow[r as usize]);
    for s in s_min..=r {
        let pairs = prec.mul(
            &prec.mul(&c_nr, &prec.binomial(r, s)),
            &prec.binomial(n - r, r - s),
        );
        let base = prec.add(&prec.sub(&one, &two_qr), &qpow[(2 * r - s) as usize]);
        let outside = prec.powi(&base, n + s - 2 * r);
        let mutual = inclusion_exclusion_with(r - s, r, &qpow, prec);
        let rho = prec.mul(&outside, &mutual);
        let excess = prec.mul(&pairs, &prec.sub(&rho, &tau2));
        m.var = prec.add(&m.var, &excess);
        if s <= r0 {
            m.v1 = prec.add(&m.v1, &excess);
        } else {
            m.v2 = prec.add(&m.v2, &prec.mul(&pairs, &rho));
        }
        m.pairs.push(pairs);
        m.rho.push(rho);
    }
    m
}

/// Exact `Var X_r = Σ_s pairs(s) (ρ(s) - τ²)`, summed in software floating
/// point and rechecked at twice the precision.
///
/// ```
/// let v = domlab::analytics::variance_exact(4, 0.5, 1, 256).unwrap();
/// assert!((v.var - 0.625).abs() < 1e-12);
/// ```
pub fn variance_exact(n: u64, p: f64, r: u64, precision_bits: usize) -> Result<VarianceProfile> {
    check_probability("p", p)?;
    if r > n {
        return Err(Error::validation("r", format!("r = {r} exceeds n = {n}")));
    }
    let r0 = r_zero(n, p, r);
    let s_min = (2 * r).saturating_sub(n);
    check_bits(precision_bits)?;
    let m = moments(n, p, r, r0, s_min, Prec(2 * precision_bits));
    agree(
        &moments(n, p, r, r0, s_min, Prec(precision_bits)).var,
        &m.var,
        precision_bits,
    )?;
    let lt = ln_tau(n, p, r);
    let ln_c_nr = ln_binomial(n, r);
    let mut per_s = Vec::with_capacity(m.rho.len());
    for (k, s) in (s_min..=r).enumerate() {
        let b = rho_bounds(n, p, r, s)?;
        let ln_pairs = hp::ln(&m.pairs[k]);
        let ln_rho = hp::ln(&m.rho[k]);
        let u_s = if lt == f64::NEG_INFINITY {
            f64::NAN
        } else {
            (ln_pairs - 2.0 * ln_c_nr + ln_rho - 2.0 * lt).exp()
        };
        per_s.push(OverlapProfile {
            s,
            ln_pair_count: ln_pairs,
            rho: hp::to_f64(&m.rho[k]),
            ln_rho,
            simple_bound: b.simple,
            composite_bound: b.composite,
            improved_base: b.improved_base,
            mutual_lemma_base: b.mutual_lemma_base,
            u_s,
        });
    }
    let wide = Prec(2 * precision_bits);
    let ratio = if m.expected.is_zero() {
        f64::NAN
    } else {
        hp::to_f64(&wide.div(&m.var, &wide.mul(&m.expected, &m.expected)))
    };
    Ok(VarianceProfile {
        n,
        p,
        r,
        r0,
        expected: hp::to_f64(&m.expected),
        var: hp::to_f64(&m.var),
        ln_var: hp::ln(&m.var),
        ratio,
        v1: hp::to_f64(&m.v1),
        v2: hp::to_f64(&m.v2),
        per_s,
        precision_bits,
        verified: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBounds {
    pub r_hat: RHat,
    /// `E[X_{r̂-1}] >= Pr(γ <= r̂ - 1)`.
    pub markov_lower_tail: f64,
    /// `Var X_{r̂+1} / E[X_{r̂+1}]²` clamped to `[0, 1]`; bounds
    /// `Pr(γ >= r̂ + 2)`.
    pub chebyshev_upper_tail: f64,
    /// The unclamped ratio.
    pub chebyshev_raw: f64,
}

pub fn tail_bounds(n: u64, p: f64, precision_bits: usize) -> Result<TailBounds> {
    let rh = r_hat(n, p)?;
    let markov = log_expected_dom_sets(n, p, rh.r_hat - 1).exp();
    let r = rh.r_hat + 1;
    // r̂ = n leaves Pr(γ >= n + 2) = 0.
    let raw = if r > n {
        0.0
    } else {
        variance_exact(n, p, r, precision_bits)?.ratio
    };
    Ok(TailBounds {
        r_hat: rh,
        markov_lower_tail: markov,
        chebyshev_upper_tail: raw.clamp(0.0, 1.0),
        chebyshev_raw: raw,
    })
}
