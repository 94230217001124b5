use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{fmt_num, fmt_opt, Experiment, ExperimentConfig, Report, Tabular};
use crate::analytics::{
    exact_mutual_dom_prob, exact_no_isolated_prob, log_expected_dom_sets, poisson_bounds,
    poisson_params, rho_bounds, tail_bounds, variance_exact, HighPrecProb, PoissonBounds,
    PoissonMode, RHat,
};
use crate::bits::VertexSet;
use crate::coupling::{anti_conc_config, tv_chain_bound, AntiConcConfig, GnpCoupler, TvChain};
use crate::domination::{
    count_dominating_sets, domination_number, mutually_dominate, DEFAULT_SOLVER_CAP,
    DEFAULT_WORK_CAP,
};
use crate::error::{check_probability, Error, Result};
use crate::graph::{count_isolated, gen_bipartite, gen_gnp, Graph};
use crate::rng::RngStream;
use crate::stats::{wilson_interval, z_two_sided};

/// Confidence of the per-edge marginal bands in the coupling experiment.
pub const EDGE_BAND_CONFIDENCE: f64 = 0.9999;

fn pool(cfg: &ExperimentConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::validation("threads", e.to_string()))
}

/// Run `f` on every trial stream and collect the outcomes in trial order.
fn per_trial<T, F>(cfg: &ExperimentConfig, experiment_id: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(RngStream) -> Result<T> + Sync,
{
    pool(cfg)?.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| f(RngStream::new(cfg.seed, experiment_id, t)))
            .collect()
    })
}

fn count_true(v: &[bool]) -> u64 {
    v.iter().filter(|&&b| b).count() as u64
}

/// Proportion with its Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub est: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    fn new(successes: u64, trials: u64, confidence: f64) -> Self {
        let (lo, hi) = wilson_interval(successes, trials, confidence);
        Proportion {
            successes,
            trials,
            est: successes as f64 / trials as f64,
            lo,
            hi,
        }
    }

    /// Binomial standard deviation of the estimate if the true value were
    /// `bound` (capped to `[0, 1]`).
    pub fn sigma_at(&self, bound: f64) -> f64 {
        let b = bound.clamp(0.0, 1.0);
        (b * (1.0 - b) / self.trials as f64).sqrt()
    }
}

// ---------------------------------------------------------------- xzero

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XzeroSummary {
    pub n_side: u64,
    pub p: f64,
    pub seed: u64,
    /// Estimate of `Pr(X = 0)`.
    pub estimate: Proportion,
    pub exact: HighPrecProb,
    pub bounds: PoissonBounds,
}

impl Tabular for XzeroSummary {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "N",
            "p",
            "trials",
            "seed",
            "est",
            "lo",
            "hi",
            "exact",
            "upper",
            "lower_exp",
            "lower_fkg",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let e = &self.estimate;
        vec![vec![
            self.n_side.to_string(),
            fmt_num(self.p),
            e.trials.to_string(),
            self.seed.to_string(),
            fmt_num(e.est),
            fmt_num(e.lo),
            fmt_num(e.hi),
            fmt_num(self.exact.value),
            fmt_num(self.bounds.upper),
            fmt_opt(self.bounds.lower_exp),
            fmt_opt(self.bounds.lower_fkg),
        ]]
    }
}

/// Estimate `Pr(G(N,N,p) has no isolated vertex)`.
pub fn run_xzero(cfg: &ExperimentConfig) -> Result<Report<XzeroSummary>> {
    let start = Instant::now();
    cfg.validate()?;
    let Experiment::Xzero { n_side, p } = cfg.experiment else {
        return Err(Error::validation("kind", "expected an xzero experiment"));
    };
    check_probability("p", p)?;
    if n_side == 0 {
        return Err(Error::validation("N", "side size must be at least 1"));
    }
    let exact = exact_no_isolated_prob(n_side, p, cfg.precision_bits)?;
    let bounds = poisson_bounds(&poisson_params(PoissonMode::Bipartite { n_side }, p)?);
    let hits = per_trial(cfg, cfg.experiment.id(), |s| {
        Ok(count_isolated(&gen_bipartite(n_side as usize, p, s)?) == 0)
    })?;
    Ok(Report {
        config: cfg.clone(),
        summary: XzeroSummary {
            n_side,
            p,
            seed: cfg.seed,
            estimate: Proportion::new(count_true(&hits), cfg.trials, cfg.confidence),
            exact,
            bounds,
        },
        wall_time: start.elapsed(),
    })
}

// ----------------------------------------------------------- mutual_dom

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MutualDomSummary {
    pub r: u64,
    pub s: u64,
    pub p: f64,
    pub seed: u64,
    pub estimate: Proportion,
    pub exact: HighPrecProb,
    /// Poisson upper bound with the overlap parameters.
    pub poisson_upper: f64,
    /// `max(0, 1 - 2q^r)^{r-s}`.
    pub lemma_base: f64,
}

impl Tabular for MutualDomSummary {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "r",
            "s",
            "p",
            "trials",
            "seed",
            "est",
            "lo",
            "hi",
            "exact",
            "poisson_upper",
            "lemma_base",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let e = &self.estimate;
        vec![vec![
            self.r.to_string(),
            self.s.to_string(),
            fmt_num(self.p),
            e.trials.to_string(),
            self.seed.to_string(),
            fmt_num(e.est),
            fmt_num(e.lo),
            fmt_num(e.hi),
            fmt_num(self.exact.value),
            fmt_num(self.poisson_upper),
            fmt_num(self.lemma_base),
        ]]
    }
}

/// Estimate the probability that two `r`-sets sharing `s` vertices
/// dominate each other. Only the `2r - s` vertices of `A ∪ B` are sampled.
pub fn run_mutual_dom(cfg: &ExperimentConfig) -> Result<Report<MutualDomSummary>> {
    let start = Instant::now();
    cfg.validate()?;
    let Experiment::MutualDom { r, s, p } = cfg.experiment else {
        return Err(Error::validation(
            "kind",
            "expected a mutual_dom experiment",
        ));
    };
    check_probability("p", p)?;
    if s > r {
        return Err(Error::validation("s", format!("s = {s} exceeds r = {r}")));
    }
    let exact = exact_mutual_dom_prob(r, s, p, cfg.precision_bits)?;
    let poisson_upper = poisson_bounds(&poisson_params(PoissonMode::Overlap { r, s }, p)?).upper;
    let v = (2 * r - s) as usize;
    let lemma_base = rho_bounds(v as u64, p, r, s)?.mutual_lemma_base;
    let a = VertexSet::from_indices(v, 0..r as usize);
    let b = VertexSet::from_indices(v, (r - s) as usize..v);
    let hits = per_trial(cfg, cfg.experiment.id(), |st| {
        Ok(mutually_dominate(&gen_gnp(v, p, st)?, &a, &b))
    })?;
    Ok(Report {
        config: cfg.clone(),
        summary: MutualDomSummary {
            r,
            s,
            p,
            seed: cfg.seed,
            estimate: Proportion::new(count_true(&hits), cfg.trials, cfg.confidence),
            exact,
            poisson_upper,
            lemma_base,
        },
        wall_time: start.elapsed(),
    })
}

// -------------------------------------------------------- concentration

fn check_solver_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("n", "need at least one vertex"));
    }
    if n > DEFAULT_SOLVER_CAP {
        return Err(Error::capacity(
            "solver",
            format!("n = {n} exceeds solver cap {DEFAULT_SOLVER_CAP}"),
        ));
    }
    Ok(())
}

fn histogram(values: &[usize]) -> Vec<u64> {
    let mut h = vec![0u64; values.iter().max().map_or(0, |m| m + 1)];
    for &v in values {
        h[v] += 1;
    }
    h
}

fn mean_of(values: &[usize]) -> f64 {
    values.iter().map(|&v| v as u64).sum::<u64>() as f64 / values.len() as f64
}

fn gamma_samples(cfg: &ExperimentConfig, id: u64, n: usize, p: f64) -> Result<Vec<usize>> {
    per_trial(cfg, id, |s| domination_number(&gen_gnp(n, p, s)?, None))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationSummary {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub r_hat: RHat,
    /// `hist[k]` trials had `γ = k`.
    pub hist: Vec<u64>,
    pub mean_gamma: f64,
    /// `ln(np)/p`, the first-order typical value.
    pub typical: f64,
    /// Mass on `{r̂, r̂ + 1}`.
    pub two_point: Proportion,
    /// `Pr(γ <= r̂ - 1)` with its Markov bound `E[X_{r̂-1}]`.
    pub lower_tail: Proportion,
    pub markov_bound: f64,
    /// `Pr(γ >= r̂ + 2)` with its Chebyshev bound.
    pub upper_tail: Proportion,
    pub chebyshev_bound: f64,
}

impl Tabular for ConcentrationSummary {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "n", "p", "trials", "seed", "quantity", "value", "lo", "hi", "bound", "sigma",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let lead = || {
            vec![
                self.n.to_string(),
                fmt_num(self.p),
                self.two_point.trials.to_string(),
                self.seed.to_string(),
            ]
        };
        let row = |q: String, rest: [String; 5]| {
            let mut r = lead();
            r.push(q);
            r.extend(rest);
            r
        };
        let e = String::new;
        let prop = |name: &str, pr: &Proportion, bound: Option<f64>| {
            row(
                name.to_string(),
                [
                    fmt_num(pr.est),
                    fmt_num(pr.lo),
                    fmt_num(pr.hi),
                    fmt_opt(bound),
                    bound.map(|b| fmt_num(pr.sigma_at(b))).unwrap_or_default(),
                ],
            )
        };
        let mut rows = vec![
            row(
                "r_hat".into(),
                [
                    self.r_hat.r_hat.to_string(),
                    e(),
                    e(),
                    fmt_num(self.r_hat.predictor),
                    e(),
                ],
            ),
            row(
                "mean_gamma".into(),
                [
                    fmt_num(self.mean_gamma),
                    e(),
                    e(),
                    fmt_num(self.typical),
                    e(),
                ],
            ),
            prop("two_point_mass", &self.two_point, None),
            prop("lower_tail", &self.lower_tail, Some(self.markov_bound)),
            prop("upper_tail", &self.upper_tail, Some(self.chebyshev_bound)),
        ];
        for (k, &c) in self.hist.iter().enumerate().filter(|(_, &c)| c > 0) {
            rows.push(row(
                format!("gamma={k}"),
                [c.to_string(), e(), e(), e(), e()],
            ));
        }
        rows
    }
}

/// Sample `γ(G(n,p))` exactly and compare its tails with the first- and
/// second-moment bounds.
pub fn run_concentration(cfg: &ExperimentConfig) -> Result<Report<ConcentrationSummary>> {
    let start = Instant::now();
    cfg.validate()?;
    let Experiment::Concentration { n, p } = cfg.experiment else {
        return Err(Error::validation(
            "kind",
            "expected a concentration experiment",
        ));
    };
    check_probability("p", p)?;
    let tails = tail_bounds(n as u64, p, cfg.precision_bits)?;
    check_solver_n(n)?;
    let gammas = gamma_samples(cfg, cfg.experiment.id(), n, p)?;
    let rh = tails.r_hat.r_hat as usize;
    let t = cfg.trials;
    let count = |pred: &dyn Fn(usize) -> bool| gammas.iter().filter(|&&g| pred(g)).count() as u64;
    Ok(Report {
        config: cfg.clone(),
        summary: ConcentrationSummary {
            n,
            p,
            seed: cfg.seed,
            r_hat: tails.r_hat,
            hist: histogram(&gammas),
            mean_gamma: mean_of(&gammas),
            typical: (n as f64 * p).ln() / p,
            two_point: Proportion::new(count(&|g| g == rh || g == rh + 1), t, cfg.confidence),
            lower_tail: Proportion::new(count(&|g| g < rh), t, cfg.confidence),
            markov_bound: tails.markov_lower_tail,
            upper_tail: Proportion::new(count(&|g| g >= rh + 2), t, cfg.confidence),
            chebyshev_bound: tails.chebyshev_upper_tail,
        },
        wall_time: start.elapsed(),
    })
}

// ------------------------------------------------------------- variance

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceSummary {
    pub n: usize,
    pub r: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub mean_se: f64,
    /// Unbiased sample variance of `X_r`.
    pub var: f64,
    /// Standard error of `var` from the sample fourth moment.
    pub var_se: f64,
    pub exact_mean: f64,
    pub exact_var: f64,
}

fn z_score(est: f64, exact: f64, se: f64) -> f64 {
    if se > 0.0 {
        (est - exact) / se
    } else if (est - exact).abs() <= 1e-12 * exact.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

impl VarianceSummary {
    pub fn z_mean(&self) -> f64 {
        z_score(self.mean, self.exact_mean, self.mean_se)
    }

    pub fn z_var(&self) -> f64 {
        z_score(self.var, self.exact_var, self.var_se)
    }
}

impl Tabular for VarianceSummary {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "n", "r", "p", "trials", "seed", "quantity", "estimate", "se", "exact", "z",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let row = |q: &str, est: f64, se: f64, exact: f64, z: f64| {
            vec![
                self.n.to_string(),
                self.r.to_string(),
                fmt_num(self.p),
                self.trials.to_string(),
                self.seed.to_string(),
                q.to_string(),
                fmt_num(est),
                fmt_num(se),
                fmt_num(exact),
                fmt_num(z),
            ]
        };
        vec![
            row(
                "mean",
                self.mean,
                self.mean_se,
                self.exact_mean,
                self.z_mean(),
            ),
            row(
                "variance",
                self.var,
                self.var_se,
                self.exact_var,
                self.z_var(),
            ),
        ]
    }
}

/// Count dominating `r`-sets per trial and compare the sample moments
/// with `E[X_r]` and the exact variance.
pub fn run_variance(cfg: &ExperimentConfig) -> Result<Report<VarianceSummary>> {
    let start = Instant::now();
    cfg.validate()?;
    let Experiment::Variance { n, r, p } = cfg.experiment else {
        return Err(Error::validation("kind", "expected a variance experiment"));
    };
    check_probability("p", p)?;
    if n == 0 || r > n as u64 {
        return Err(Error::validation(
            "r",
            format!("need 0 <= r <= n, n >= 1 (r = {r}, n = {n})"),
        ));
    }
    let exact = variance_exact(n as u64, p, r, cfg.precision_bits)?;
    let counts = per_trial(cfg, cfg.experiment.id(), |s| {
        count_dominating_sets(&gen_gnp(n, p, s)?, r as usize, DEFAULT_WORK_CAP).map_err(|e| match e
        {
            Error::Capacity { detail, .. } => Error::validation("r", detail),
            other => other,
        })
    })?;
    let t = counts.len() as f64;
    let mean = counts.iter().map(|&x| x as f64).sum::<f64>() / t;
    let central = |k: i32| {
        counts
            .iter()
            .map(|&x| (x as f64 - mean).powi(k))
            .sum::<f64>()
            / t
    };
    let (m2, m4) = (central(2), central(4));
    let var = if counts.len() > 1 {
        m2 * t / (t - 1.0)
    } else {
        0.0
    };
    let var_se = if counts.len() > 3 {
        ((m4 - var * var * (t - 3.0) / (t - 1.0)).max(0.0) / t).sqrt()
    } else {
        f64::NAN
    };
    Ok(Report {
        config: cfg.clone(),
        summary: VarianceSummary {
            n,
            r,
            p,
            trials: cfg.trials,
            seed: cfg.seed,
            mean,
            mean_se: (var / t).sqrt(),
            var,
            var_se,
            exact_mean: log_expected_dom_sets(n as u64, p, r).exp(),
            exact_var: exact.var,
        },
        wall_time: start.elapsed(),
    })
}

// ------------------------------------------------------------- coupling

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingSummary {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    /// Trials with `G₁ ≠ G₂`.
    pub unequal: Proportion,
    /// `d_TV(Bin(M,p), Bin(M,q))`, the exact mismatch probability.
    pub tv_exact: f64,
    pub chain: TvChain,
    /// Largest per-edge `|z|` of the empirical edge frequency of `G₁`
    /// (against `p`) and `G₂` (against `q`).
    pub g1_max_z: f64,
    pub g2_max_z: f64,
    /// Edges whose frequency leaves the [`EDGE_BAND_CONFIDENCE`] band.
    pub g1_outside: u64,
    pub g2_outside: u64,
    pub band_z: f64,
}

impl Tabular for CouplingSummary {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "n",
            "p",
            "q",
            "trials",
            "seed",
            "unequal_est",
            "lo",
            "hi",
            "tv_exact",
            "kl_term",
            "pinsker",
            "tv_bound",
            "sigma",
            "g1_max_z",
            "g2_max_z",
            "g1_outside",
            "g2_outside",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let u = &self.unequal;
        vec![vec![
            self.n.to_string(),
            fmt_num(self.p),
            fmt_num(self.q),
            u.trials.to_string(),
            self.seed.to_string(),
            fmt_num(u.est),
            fmt_num(u.lo),
            fmt_num(u.hi),
            fmt_num(self.tv_exact),
            fmt_num(self.chain.kl_term),
            fmt_num(self.chain.pinsker_term),
            fmt_num(self.chain.final_bound),
            fmt_num(u.sigma_at(self.chain.final_bound)),
            fmt_num(self.g1_max_z),
            fmt_num(self.g2_max_z),
            self.g1_outside.to_string(),
            self.g2_outside.to_string(),
        ]]
    }
}

#[derive(Clone)]
struct EdgeTally {
    equal: u64,
    c1: Vec<u64>,
    c2: Vec<u64>,
}

impl EdgeTally {
    fn new(m: usize) -> Self {
        EdgeTally {
            equal: 0,
            c1: vec![0; m],
            c2: vec![0; m],
        }
    }

    fn merge(mut self, other: EdgeTally) -> EdgeTally {
        self.equal += other.equal;
        for (a, b) in self.c1.iter_mut().zip(&other.c1) {
            *a += b;
        }
        for (a, b) in self.c2.iter_mut().zip(&other.c2) {
            *a += b;
        }
        self
    }
}

fn tally_edges(g: &Graph, counts: &mut [u64]) {
    let n = g.n();
    let mut start = 0;
    for u in 0..n {
        for v in g.neighbors(u).filter(|&v| v > u) {
            counts[start + v - u - 1] += 1;
        }
        start += n - 1 - u;
    }
}

fn max_abs_z(counts: &[u64], trials: u64, p: f64, band: f64) -> (f64, u64) {
    let t = trials as f64;
    let sd = (t * p * (1.0 - p)).sqrt();
    let mut worst = 0.0f64;
    let mut outside = 0;
    for &c in counts {
        let z = z_score(c as f64, t * p, sd).abs();
        worst = worst.max(z);
        if z > band {
            outside += 1;
        }
    }
    (worst, outside)
}

/// Draw coupled `(G(n,p), G(n,q))` pairs and compare the mismatch rate with
/// the TV chain bound; also checks both marginals edge by edge.
pub fn run_coupling(cfg: &ExperimentConfig) -> Result<Report<CouplingSummary>> {
    let start = Instant::now();
    cfg.validate()?;
    let Experiment::Coupling { n, p, q } = cfg.experiment else {
        return Err(Error::validation("kind", "expected a coupling experiment"));
    };
    for (what, x) in [("p", p), ("q", q)] {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::validation(what, format!("{x} is not in (0, 1)")));
        }
    }
    let chain = tv_chain_bound(n as u64, p, q)?;
    let coupler = GnpCoupler::new(n, p, q)?;
    let m = n * n.saturating_sub(1) / 2;
    let id = cfg.experiment.id();
    let tally = pool(cfg)?.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .fold(
                || EdgeTally::new(m),
                |mut acc, t| {
                    let pair = coupler.sample(RngStream::new(cfg.seed, id, t));
                    acc.equal += u64::from(pair.equal);
                    tally_edges(&pair.g1, &mut acc.c1);
                    tally_edges(&pair.g2, &mut acc.c2);
                    acc
                },
            )
            .reduce(|| EdgeTally::new(m), EdgeTally::merge)
    });
    let band_z = z_two_sided(EDGE_BAND_CONFIDENCE);
    let (g1_max_z, g1_outside) = max_abs_z(&tally.c1, cfg.trials, p, band_z);
    let (g2_max_z, g2_outside) = max_abs_z(&tally.c2, cfg.trials, q, band_z);
    Ok(Report {
        config: cfg.clone(),
        summary: CouplingSummary {
            n,
            p,
            q,
            seed: cfg.seed,
            unequal: Proportion::new(cfg.trials - tally.equal, cfg.trials, cfg.confidence),
            tv_exact: coupler.counts().tv_distance(),
            chain,
            g1_max_z,
            g2_max_z,
            g1_outside,
            g2_outside,
            band_z,
        },
        wall_time: start.elapsed(),
    })
}

// ------------------------------------------------------------ anti_conc

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiConcRow {
    pub index: u64,
    pub p_i: f64,
    pub hist: Vec<u64>,
    pub mean_gamma: f64,
    /// Shortest run of consecutive `γ` values holding at least `1 - ε` of
    /// the trials.
    pub interval: (usize, usize),
    pub interval_mass: f64,
    /// `ln(n p_i) / p_i`.
    pub typical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiConcSummary {
    pub grid: AntiConcConfig,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<AntiConcRow>,
}

/// Shortest window `[lo, hi]` of `hist` with at least `need` counts;
/// leftmost on ties.
fn shortest_window(hist: &[u64], need: u64) -> (usize, usize, u64) {
    let mut best = (0, hist.len().saturating_sub(1), hist.iter().sum::<u64>());
    let mut best_len = usize::MAX;
    for lo in 0..hist.len() {
        let mut acc = 0;
        for (hi, &c) in hist.iter().enumerate().skip(lo) {
            acc += c;
            if acc >= need {
                if hi - lo < best_len {
                    best_len = hi - lo;
                    best = (lo, hi, acc);
                }
                break;
            }
        }
    }
    best
}

impl Tabular for AntiConcSummary {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "n",
            "p",
            "epsilon",
            "trials",
            "seed",
            "i",
            "p_i",
            "step",
            "grid_size",
            "mean_gamma",
            "interval_lo",
            "interval_hi",
            "interval_mass",
            "interval_len",
            "ell",
            "typical",
            "hist",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let g = &self.grid;
        self.rows
            .iter()
            .map(|r| {
                let hist: Vec<String> = r
                    .hist
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(k, c)| format!("{k}:{c}"))
                    .collect();
                vec![
                    g.n.to_string(),
                    fmt_num(g.p),
                    fmt_num(g.epsilon),
                    self.trials.to_string(),
                    self.seed.to_string(),
                    r.index.to_string(),
                    fmt_num(r.p_i),
                    fmt_num(g.step),
                    g.grid_size.to_string(),
                    fmt_num(r.mean_gamma),
                    r.interval.0.to_string(),
                    r.interval.1.to_string(),
                    fmt_num(r.interval_mass),
                    (r.interval.1 - r.interval.0).to_string(),
                    fmt_num(g.interval_length),
                    fmt_num(r.typical),
                    hist.join(";"),
                ]
            })
            .collect()
    }
}

/// Sample `γ(G(n, p_i))` on a subsample of the anti-concentration grid.
/// Grid point `i` uses experiment id `6 << 32 | i`.
pub fn run_anti_conc(cfg: &ExperimentConfig) -> Result<Report<AntiConcSummary>> {
    let start = Instant::now();
    cfg.validate()?;
    let Experiment::AntiConc {
        n,
        p,
        epsilon,
        ref grid,
    } = cfg.experiment
    else {
        return Err(Error::validation(
            "kind",
            "expected an anti_conc experiment",
        ));
    };
    let ac = anti_conc_config(n as u64, p, epsilon)?;
    check_solver_n(n)?;
    let indices = grid.clone().unwrap_or_else(|| ac.subsample(9));
    if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > ac.grid_size) {
        return Err(Error::validation(
            "grid",
            format!("index {bad} outside 1..={}", ac.grid_size),
        ));
    }
    let need = ((1.0 - epsilon) * cfg.trials as f64).ceil() as u64;
    let mut rows = Vec::with_capacity(indices.len());
    for &i in &indices {
        let p_i = ac.grid_point(i);
        let gammas = gamma_samples(cfg, (cfg.experiment.id() << 32) | i, n, p_i)?;
        let hist = histogram(&gammas);
        let (lo, hi, mass) = shortest_window(&hist, need);
        rows.push(AntiConcRow {
            index: i,
            p_i,
            mean_gamma: mean_of(&gammas),
            interval: (lo, hi),
            interval_mass: mass as f64 / cfg.trials as f64,
            typical: (n as f64 * p_i).ln() / p_i,
            hist,
        });
    }
    Ok(Report {
        config: cfg.clone(),
        summary: AntiConcSummary {
            grid: ac,
            trials: cfg.trials,
            seed: cfg.seed,
            rows,
        },
        wall_time: start.elapsed(),
    })
}

// ------------------------------------------------------------- dispatch

/// A finished report of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Xzero(Report<XzeroSummary>),
    MutualDom(Report<MutualDomSummary>),
    Concentration(Report<ConcentrationSummary>),
    Variance(Report<VarianceSummary>),
    Coupling(Report<CouplingSummary>),
    AntiConc(Report<AntiConcSummary>),
}

impl Outcome {
    pub fn to_csv(&self) -> String {
        match self {
            Outcome::Xzero(r) => r.to_csv(),
            Outcome::MutualDom(r) => r.to_csv(),
            Outcome::Concentration(r) => r.to_csv(),
            Outcome::Variance(r) => r.to_csv(),
            Outcome::Coupling(r) => r.to_csv(),
            Outcome::AntiConc(r) => r.to_csv(),
        }
    }
}

/// Run whichever experiment `cfg` describes.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    Ok(match cfg.experiment {
        Experiment::Xzero { .. } => Outcome::Xzero(run_xzero(cfg)?),
        Experiment::MutualDom { .. } => Outcome::MutualDom(run_mutual_dom(cfg)?),
        Experiment::Concentration { .. } => Outcome::Concentration(run_concentration(cfg)?),
        Experiment::Variance { .. } => Outcome::Variance(run_variance(cfg)?),
        Experiment::Coupling { .. } => Outcome::Coupling(run_coupling(cfg)?),
        Experiment::AntiConc { .. } => Outcome::AntiConc(run_anti_conc(cfg)?),
    })
}

/// The graph sampled in trial `trial` of a concentration or variance run.
pub fn trial_graph(cfg: &ExperimentConfig, trial: u64) -> Result<Graph> {
    let (n, p) = match cfg.experiment {
        Experiment::Concentration { n, p } | Experiment::Variance { n, p, .. } => (n, p),
        _ => {
            return Err(Error::validation(
                "dump-graph",
                format!(
                    "{} experiments do not sample a single G(n,p)",
                    cfg.experiment.name()
                ),
            ))
        }
    };
    gen_gnp(n, p, RngStream::new(cfg.seed, cfg.experiment.id(), trial))
}
