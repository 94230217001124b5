//! Seeded, parallel Monte Carlo experiments and their CSV reports.
//!
//! Trial `t` of an experiment draws all of its randomness from
//! `RngStream::new(seed, experiment_id, t)`, and per-trial outcomes are
//! either collected in trial order or merged with integer sums. A report is
//! therefore a pure function of its configuration; the thread count only
//! changes how fast it is produced.

mod experiments;

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::analytics::DEFAULT_PRECISION_BITS;
use crate::error::{Error, Result};

pub use crate::stats::wilson_interval;
pub use experiments::{
    run, run_anti_conc, run_concentration, run_coupling, run_mutual_dom, run_variance, run_xzero,
    trial_graph, AntiConcRow, AntiConcSummary, ConcentrationSummary, CouplingSummary,
    MutualDomSummary, Outcome, VarianceSummary, XzeroSummary, EDGE_BAND_CONFIDENCE,
};

/// Default Wilson confidence level for reports.
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// Crate version embedded in every report.
pub const VERSION: &str = concat!("domlab ", env!("CARGO_PKG_VERSION"));

/// Parameters of one experiment kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    /// `Pr(no isolated vertex)` in `G(N,N,p)`.
    Xzero {
        #[serde(rename = "N")]
        n_side: u64,
        p: f64,
    },
    /// Mutual domination of two `r`-sets sharing `s` vertices.
    MutualDom { r: u64, s: u64, p: f64 },
    /// Distribution of `γ(G(n,p))` against `r̂` and the tail bounds.
    Concentration { n: usize, p: f64 },
    /// Empirical moments of `X_r` against the exact ones.
    Variance { n: usize, r: u64, p: f64 },
    /// Coupled `G(n,p)`, `G(n,q)` pairs.
    Coupling { n: usize, p: f64, q: f64 },
    /// `γ` on a subsample of the anti-concentration grid.
    AntiConc {
        n: usize,
        p: f64,
        epsilon: f64,
        /// Grid indices; defaults to nine evenly spaced ones.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<Vec<u64>>,
    },
}

impl Experiment {
    pub fn id(&self) -> u64 {
        match self {
            Experiment::Xzero { .. } => 1,
            Experiment::MutualDom { .. } => 2,
            Experiment::Concentration { .. } => 3,
            Experiment::Variance { .. } => 4,
            Experiment::Coupling { .. } => 5,
            Experiment::AntiConc { .. } => 6,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Xzero { .. } => "xzero",
            Experiment::MutualDom { .. } => "mutual_dom",
            Experiment::Concentration { .. } => "concentration",
            Experiment::Variance { .. } => "variance",
            Experiment::Coupling { .. } => "coupling",
            Experiment::AntiConc { .. } => "anti_conc",
        }
    }
}

fn default_precision() -> usize {
    DEFAULT_PRECISION_BITS
}

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

/// A complete, reproducible experiment description.
///
/// `threads` is a scheduling hint only; it is not serialized because it
/// never affects the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_precision")]
    pub precision_bits: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            trials,
            seed,
            precision_bits: DEFAULT_PRECISION_BITS,
            confidence: DEFAULT_CONFIDENCE,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    /// Checks shared by every kind; kind-specific checks happen in `run_*`.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::validation(
                "trials",
                "at least one trial is required",
            ));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::validation(
                "confidence",
                format!("{} is not in (0, 1)", self.confidence),
            ));
        }
        if self.precision_bits < 64 {
            return Err(Error::validation(
                "precision-bits",
                format!("{} bits is below the minimum of 64", self.precision_bits),
            ));
        }
        if self.threads == Some(0) {
            return Err(Error::validation("threads", "need at least one thread"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("config", e.to_string()))
    }
}

/// A table that can be written as CSV.
pub trait Tabular {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

/// Result of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report<T> {
    pub config: ExperimentConfig,
    pub summary: T,
    /// Not part of the CSV, which must be reproducible byte for byte.
    pub wall_time: Duration,
}

impl<T: Tabular> Report<T> {
    /// `#version=` and `#config=` comment lines, a header row, data rows.
    pub fn to_csv(&self) -> String {
        csv_document(&self.config.to_json(), &self.summary)
    }
}

/// Render `table` as a CSV document echoing `config_json`.
pub fn csv_document(config_json: &str, table: &dyn Tabular) -> String {
    let mut out = String::new();
    writeln!(out, "#version={VERSION}").unwrap();
    writeln!(out, "#config={config_json}").unwrap();
    writeln!(out, "{}", table.header().join(",")).unwrap();
    for row in table.rows() {
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

/// Format a real with 12 significant digits in `%g` style. `NaN` prints as
/// `nan`, infinities as `inf`/`-inf`.
///
/// ```
/// use domlab::harness::fmt_num;
/// assert_eq!(fmt_num(0.4375), "0.4375");
/// assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
/// assert_eq!(fmt_num(2.5e-8), "2.5e-08");
/// assert_eq!(fmt_num(181818.0), "181818");
/// ```
pub fn fmt_num(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `fmt_num` for optional values; absent values become empty cells.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}
