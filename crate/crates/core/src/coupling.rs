//! Couplings of `G(n,p)` with `G(n,q)`, the Bernoulli KL/Pinsker chain
//! bounding their total variation distance, and the probability grid of
//! the anti-concentration argument.
//!
//! The coupling works at the level of edge counts. Conditioned on having
//! `m` edges, `G(n,p)` is uniform over `m`-edge graphs for every `p`, so a
//! maximal coupling of `Bin(M,p)` and `Bin(M,q)` (with `M = C(n,2)`)
//! followed by one shared uniform edge order couples the graphs with
//! `Pr(G₁ = G₂) = 1 - d_TV(Bin(M,p), Bin(M,q))`.

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{check_probability, Error, Result};
use crate::graph::{Graph, DEFAULT_MAX_VERTICES};
use crate::rng::RngStream;
use crate::special::ln_binomial;

/// Bernoulli relative entropy `KL(p ‖ q)` in nats; `+inf` when `p` puts
/// mass where `q` has none.
///
/// ```
/// let d = domlab::coupling::kl_bernoulli(0.5, 0.25);
/// assert!((d - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-15);
/// ```
pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    fn term(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    }
    if p == q {
        return 0.0;
    }
    (term(p, q) + term(1.0 - p, 1.0 - q)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvChain {
    /// `C(n,2) · KL(p ‖ q)`, the KL divergence between the two graph laws.
    pub kl_term: f64,
    /// `sqrt(kl_term / 2)` (Pinsker).
    pub pinsker_term: f64,
    /// `n |p - q| / sqrt(4 q (1-q))`, unclamped.
    pub final_raw: f64,
    /// `final_raw` capped at 1.
    pub final_bound: f64,
}

/// Chain of upper bounds on `d_TV(G(n,p), G(n,q))`.
///
/// ```
/// let c = domlab::coupling::tv_chain_bound(100, 0.1, 0.105).unwrap();
/// assert!((c.final_bound - 0.8156).abs() < 1e-4);
/// assert!(c.pinsker_term <= c.final_bound);
/// ```
pub fn tv_chain_bound(n: u64, p: f64, q: f64) -> Result<TvChain> {
    check_probability("p", p)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::validation("q", format!("{q} is not in (0, 1)")));
    }
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    let kl_term = pairs.max(0.0) * kl_bernoulli(p, q);
    let final_raw = n as f64 * (p - q).abs() / (4.0 * q * (1.0 - q)).sqrt();
    Ok(TvChain {
        kl_term,
        pinsker_term: (0.5 * kl_term).sqrt(),
        final_raw,
        final_bound: final_raw.min(1.0),
    })
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn binomial_pmf(m: u64, p: f64) -> Vec<f64> {
    if p == 0.0 || p == 1.0 {
        let mut f = vec![0.0; m as usize + 1];
        f[if p == 0.0 { 0 } else { m as usize }] = 1.0;
        return f;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let logs: Vec<f64> = (0..=m)
        .map(|k| ln_binomial(m, k) + k as f64 * lp + (m - k) as f64 * lq)
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let f: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total = compensated_sum(f.iter().copied());
    f.into_iter().map(|x| x / total).collect()
}

/// Cumulative table for inverse-CDF draws from a nonnegative weight vector.
#[derive(Debug, Clone)]
struct Cdf(Vec<f64>);

impl Cdf {
    fn new(weights: &[f64]) -> Self {
        let total = compensated_sum(weights.iter().copied());
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(weights.len());
        for w in weights {
            acc += w / total;
            cdf.push(acc);
        }
        Cdf(cdf)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let k = self.0.partition_point(|&c| c <= u);
        // Rounding can leave the last entry just below 1.
        k.min(self.0.len() - 1) as u64
    }
}

/// Largest `M` for which the pmf tables are built.
pub const MAX_COUPLING_TRIALS: u64 = 1 << 26;

/// Maximal coupling of `Bin(M,p)` and `Bin(M,q)`: draws agree with
/// probability `Σ_k min(f_p(k), f_q(k))`; otherwise `x` and `y` come
/// independently from the normalized residuals.
#[derive(Debug, Clone)]
pub struct BinomialCoupling {
    m: u64,
    overlap: f64,
    common: Option<Cdf>,
    residual_p: Option<Cdf>,
    residual_q: Option<Cdf>,
}

impl BinomialCoupling {
    pub fn new(m: u64, p: f64, q: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("q", q)?;
        if m > MAX_COUPLING_TRIALS {
            return Err(Error::capacity(
                "coupling",
                format!("M = {m} exceeds {MAX_COUPLING_TRIALS} trials"),
            ));
        }
        if p == q {
            return Ok(BinomialCoupling {
                m,
                overlap: 1.0,
                common: Some(Cdf::new(&binomial_pmf(m, p))),
                residual_p: None,
                residual_q: None,
            });
        }
        let fp = binomial_pmf(m, p);
        let fq = binomial_pmf(m, q);
        let common: Vec<f64> = fp.iter().zip(&fq).map(|(a, b)| a.min(*b)).collect();
        let overlap = compensated_sum(common.iter().copied()).min(1.0);
        let rp: Vec<f64> = fp.iter().zip(&common).map(|(a, c)| a - c).collect();
        let rq: Vec<f64> = fq.iter().zip(&common).map(|(a, c)| a - c).collect();
        let nonzero = |v: &[f64]| v.iter().any(|&x| x > 0.0);
        Ok(BinomialCoupling {
            m,
            overlap,
            common: nonzero(&common).then(|| Cdf::new(&common)),
            residual_p: nonzero(&rp).then(|| Cdf::new(&rp)),
            residual_q: nonzero(&rq).then(|| Cdf::new(&rq)),
        })
    }

    pub fn trials(&self) -> u64 {
        self.m
    }

    /// `Pr(x = y) = 1 - d_TV`.
    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn tv_distance(&self) -> f64 {
        1.0 - self.overlap
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        let u: f64 = rng.random();
        match (&self.common, &self.residual_p, &self.residual_q) {
            (Some(c), _, _) if u < self.overlap => {
                let k = c.draw(rng);
                (k, k)
            }
            (_, Some(rp), Some(rq)) => (rp.draw(rng), rq.draw(rng)),
            // Residual mass lost to rounding: fall back to the common part.
            (Some(c), _, _) => {
                let k = c.draw(rng);
                (k, k)
            }
            _ => unreachable!("a coupling always has mass somewhere"),
        }
    }
}

/// One draw `(x, y, x == y)` from the maximal coupling.
///
/// ```
/// use domlab::{coupling::binomial_maximal_coupling, rng::RngStream};
/// let (x, y, eq) = binomial_maximal_coupling(10, 0.3, 0.3, RngStream::new(1, 0, 0)).unwrap();
/// assert!(eq && x == y);
/// ```
pub fn binomial_maximal_coupling(
    m: u64,
    p: f64,
    q: f64,
    stream: RngStream,
) -> Result<(u64, u64, bool)> {
    let c = BinomialCoupling::new(m, p, q)?;
    let (x, y) = c.sample(&mut stream.rng());
    Ok((x, y, x == y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPair {
    pub g1: Graph,
    pub g2: Graph,
    pub equal: bool,
    pub edge_counts: (u64, u64),
}

/// Reusable sampler for coupled `(G(n,p), G(n,q))` pairs.
#[derive(Debug, Clone)]
pub struct GnpCoupler {
    n: usize,
    counts: BinomialCoupling,
    row_start: Vec<u64>,
}

impl GnpCoupler {
    pub fn new(n: usize, p: f64, q: f64) -> Result<Self> {
        if n > DEFAULT_MAX_VERTICES {
            return Err(Error::capacity(
                "graph",
                format!("n = {n} exceeds the vertex cap {DEFAULT_MAX_VERTICES}"),
            ));
        }
        let pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
        let mut row_start = Vec::with_capacity(n);
        let mut acc = 0u64;
        for u in 0..n {
            row_start.push(acc);
            acc += (n - 1 - u) as u64;
        }
        Ok(GnpCoupler {
            n,
            counts: BinomialCoupling::new(pairs, p, q)?,
            row_start,
        })
    }

    pub fn counts(&self) -> &BinomialCoupling {
        &self.counts
    }

    /// `(u, v)` with `u < v` at position `k` of the lexicographic pair order.
    fn pair(&self, k: u64) -> (usize, usize) {
        let u = self.row_start.partition_point(|&s| s <= k) - 1;
        (u, u + 1 + (k - self.row_start[u]) as usize)
    }

    pub fn sample(&self, stream: RngStream) -> CoupledPair {
        let mut rng = stream.rng();
        let (m1, m2) = self.counts.sample(&mut rng);
        let total = self.counts.trials() as usize;
        let order = index::sample(&mut rng, total, m1.max(m2) as usize);
        let mut g1 = Graph::empty(self.n);
        let mut g2 = Graph::empty(self.n);
        for (i, k) in order.iter().enumerate() {
            let (u, v) = self.pair(k as u64);
            if (i as u64) < m1 {
                g1.add_edge(u, v);
            }
            if (i as u64) < m2 {
                g2.add_edge(u, v);
            }
        }
        CoupledPair {
            g1,
            g2,
            equal: m1 == m2,
            edge_counts: (m1, m2),
        }
    }
}

/// Draw one coupled pair. Build a [`GnpCoupler`] instead when drawing many.
pub fn coupled_gnp_pair(n: usize, p: f64, q: f64, stream: RngStream) -> Result<CoupledPair> {
    Ok(GnpCoupler::new(n, p, q)?.sample(stream))
}

/// Default `ε` of the anti-concentration grid.
pub const DEFAULT_EPSILON: f64 = 0.25;

/// The probability grid `p_i = p + (i-1)·step`, `1 <= i <= I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntiConcConfig {
    pub n: u64,
    pub p: f64,
    pub epsilon: f64,
    /// `2.2 ε sqrt(p) / n`.
    pub step: f64,
    /// `I = floor(p / step)`.
    pub grid_size: u64,
    /// `ℓ(n,p) = ε ln(np) / (n p^{3/2})`.
    pub interval_length: f64,
}

impl AntiConcConfig {
    /// `p_i` for `1 <= i <= I`.
    pub fn grid_point(&self, i: u64) -> f64 {
        assert!(
            i >= 1 && i <= self.grid_size,
            "grid index {i} outside 1..={}",
            self.grid_size
        );
        self.p + (i - 1) as f64 * self.step
    }

    /// The full grid; `I` can be far too large to materialize.
    pub fn grid(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        (1..=self.grid_size).map(|i| (i, self.grid_point(i)))
    }

    /// `k` evenly spaced indices including `1` and `I` (fewer if `I < k`).
    pub fn subsample(&self, k: u64) -> Vec<u64> {
        let big_i = self.grid_size;
        if k <= 1 || big_i == 1 {
            return vec![1];
        }
        let mut idx: Vec<u64> = (0..k)
            .map(|j| 1 + ((big_i - 1) as u128 * j as u128 / (k - 1) as u128) as u64)
            .collect();
        idx.dedup();
        idx
    }
}

/// ```
/// let c = domlab::coupling::anti_conc_config(1_000_000, 0.01, 0.25).unwrap();
/// assert_eq!(c.grid_size, 181_818);
/// assert!(domlab::coupling::anti_conc_config(1_000_000, 0.01, 0.3).is_err());
/// ```
pub fn anti_conc_config(n: u64, p: f64, epsilon: f64) -> Result<AntiConcConfig> {
    if !(epsilon > 0.0 && epsilon <= 0.25) {
        return Err(Error::validation(
            "epsilon",
            format!("{epsilon} is not in (0, 1/4]"),
        ));
    }
    if !(p > 0.0 && p <= 0.25) {
        return Err(Error::validation("p", format!("{p} is not in (0, 1/4]")));
    }
    let nf = n as f64;
    if nf * p <= 1.0 {
        return Err(Error::validation(
            "p",
            format!("np = {} must exceed 1", nf * p),
        ));
    }
    let step = 2.2 * epsilon * p.sqrt() / nf;
    let grid_size = ((p / step).floor() as u64).max(1);
    Ok(AntiConcConfig {
        n,
        p,
        epsilon,
        step,
        grid_size,
        interval_length: epsilon * (nf * p).ln() / (nf * p.powf(1.5)),
    })
}
