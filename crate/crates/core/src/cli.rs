//! Command-line front end.
//!
//! Flags are long-form only. Every run writes a CSV document whose
//! `#config=` line can be fed back to [`Invocation::from_config_line`].
//! Exit codes: 0 success, 1 runtime failure (capacity, precision, i/o),
//! 2 usage error. Failures print `error: <reason>: <message>` on stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analytics::{
    exact_mutual_dom_prob, exact_no_isolated_prob, ln_tau, poisson_bounds, poisson_params, r_zero,
    tail_bounds, tau, variance_exact, PoissonMode, DEFAULT_PRECISION_BITS,
};
use crate::error::{Error, Result};
use crate::harness::{
    csv_document, fmt_num, fmt_opt, run, trial_graph, Experiment, ExperimentConfig, Tabular,
    DEFAULT_CONFIDENCE,
};

/// Environment variable supplying the default worker count.
pub const THREADS_ENV: &str = "DOMLAB_THREADS";

fn probability(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is not in [0, 1]"))
    }
}

fn open_unit(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("{x} is not in (0, 1)"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "domlab",
    version,
    about = "Domination number of G(n,p): formulas, bounds and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Precision {
    /// Working precision of the inclusion–exclusion sums.
    #[arg(long = "precision-bits", default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: usize,
}

#[derive(Debug, Args)]
struct Run {
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads [default: $DOMLAB_THREADS, else all cores].
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE, value_parser = open_unit)]
    confidence: f64,
    #[command(flatten)]
    precision: Precision,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// r̂, r₀, τ at r̂ and the two tail bounds.
    Formulas {
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[command(flatten)]
        precision: Precision,
        #[command(flatten)]
        output: Output,
    },
    /// Poisson bounds (`--N`, or `--r --s`) or the overlap profile (`--n --r`).
    Bounds {
        #[arg(long = "N")]
        n_side: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[command(flatten)]
        precision: Precision,
        #[command(flatten)]
        output: Output,
    },
    /// Pr(no isolated vertex) in G(N,N,p).
    Xzero {
        #[arg(long = "N")]
        n_side: u64,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[command(flatten)]
        run: Run,
    },
    /// Mutual domination of two r-sets sharing s vertices.
    MutualDom {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[command(flatten)]
        run: Run,
    },
    /// Exact γ(G(n,p)) samples against r̂ and the tail bounds.
    Concentration {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = probability)]
        p: f64,
        /// Also write trial 0's graph in dump format.
        #[arg(long = "dump-graph")]
        dump_graph: Option<PathBuf>,
        #[command(flatten)]
        run: Run,
    },
    /// Sample moments of X_r against the exact mean and variance.
    Variance {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: u64,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[arg(long = "dump-graph")]
        dump_graph: Option<PathBuf>,
        #[command(flatten)]
        run: Run,
    },
    /// Coupled G(n,p), G(n,q) pairs.
    Coupling {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[arg(long, value_parser = probability)]
        q: f64,
        #[command(flatten)]
        run: Run,
    },
    /// γ on a subsample of the anti-concentration grid.
    AntiConc {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[arg(long)]
        epsilon: f64,
        /// Comma-separated grid indices (1-based).
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<u64>>,
        #[command(flatten)]
        run: Run,
    },
}

/// A direct analytics query (no sampling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    Formulas {
        n: u64,
        p: f64,
        precision_bits: usize,
    },
    Bounds {
        #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
        n_side: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<u64>,
        p: f64,
        precision_bits: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Query(Query),
    Experiment(ExperimentConfig),
}

/// A parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub action: Action,
    pub out: Option<PathBuf>,
    pub dump_graph: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad syntax, or `--help`/`--version`; carries clap's own exit code.
    Clap(clap::Error),
    Invalid(Error),
}

impl Invocation {
    /// Parse `argv` (including the program name), taking the thread default
    /// from `DOMLAB_THREADS`.
    pub fn parse<I, T>(argv: I) -> std::result::Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Self::parse_with_env(argv, std::env::var(THREADS_ENV).ok())
    }

    /// [`Invocation::parse`] with an explicit value for `DOMLAB_THREADS`.
    pub fn parse_with_env<I, T>(
        argv: I,
        env_threads: Option<String>,
    ) -> std::result::Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
        Self::from_cli(cli, env_threads).map_err(CliError::Invalid)
    }

    fn from_cli(cli: Cli, env_threads: Option<String>) -> Result<Self> {
        let experiment = |e: Experiment, run: Run, dump: Option<PathBuf>| -> Result<Invocation> {
            let threads = match (run.threads, env_threads.as_deref()) {
                (Some(t), _) => Some(t),
                (None, Some(v)) => Some(v.trim().parse().map_err(|_| {
                    Error::validation("threads", format!("{THREADS_ENV}={v:?} is not a count"))
                })?),
                (None, None) => None,
            };
            let cfg = ExperimentConfig {
                experiment: e,
                trials: run.trials,
                seed: run.seed,
                precision_bits: run.precision.precision_bits,
                confidence: run.confidence,
                threads,
            };
            cfg.validate()?;
            Ok(Invocation {
                action: Action::Experiment(cfg),
                out: run.output.out,
                dump_graph: dump,
            })
        };
        let query = |q: Query, output: Output| Invocation {
            action: Action::Query(q),
            out: output.out,
            dump_graph: None,
        };
        let inv = match cli.command {
            Command::Formulas {
                n,
                p,
                precision,
                output,
            } => query(
                Query::Formulas {
                    n,
                    p,
                    precision_bits: precision.precision_bits,
                },
                output,
            ),
            Command::Bounds {
                n_side,
                n,
                r,
                s,
                p,
                precision,
                output,
            } => query(
                Query::Bounds {
                    n_side,
                    n,
                    r,
                    s,
                    p,
                    precision_bits: precision.precision_bits,
                },
                output,
            ),
            Command::Xzero { n_side, p, run } => {
                experiment(Experiment::Xzero { n_side, p }, run, None)?
            }
            Command::MutualDom { r, s, p, run } => {
                experiment(Experiment::MutualDom { r, s, p }, run, None)?
            }
            Command::Concentration {
                n,
                p,
                dump_graph,
                run,
            } => experiment(Experiment::Concentration { n, p }, run, dump_graph)?,
            Command::Variance {
                n,
                r,
                p,
                dump_graph,
                run,
            } => experiment(Experiment::Variance { n, r, p }, run, dump_graph)?,
            Command::Coupling { n, p, q, run } => {
                experiment(Experiment::Coupling { n, p, q }, run, None)?
            }
            Command::AntiConc {
                n,
                p,
                epsilon,
                grid,
                run,
            } => experiment(
                Experiment::AntiConc {
                    n,
                    p,
                    epsilon,
                    grid,
                },
                run,
                None,
            )?,
        };
        if let Action::Query(q) = &inv.action {
            q.validate()?;
        }
        Ok(inv)
    }

    /// Rebuild an invocation from a `#config=<json>` line (or bare JSON).
    /// Output paths and thread counts are not part of the echo.
    pub fn from_config_line(line: &str) -> Result<Self> {
        let json = line.trim().strip_prefix("#config=").unwrap_or(line.trim());
        let bad = |e: serde_json::Error| Error::validation("config", e.to_string());
        let value: serde_json::Value = serde_json::from_str(json).map_err(bad)?;
        let action = match value.get("kind").and_then(|k| k.as_str()) {
            Some("formulas" | "bounds") => {
                let q: Query = serde_json::from_value(value).map_err(bad)?;
                q.validate()?;
                Action::Query(q)
            }
            _ => Action::Experiment(ExperimentConfig::from_json(json)?),
        };
        Ok(Invocation {
            action,
            out: None,
            dump_graph: None,
        })
    }

    /// The `#config=` JSON this invocation echoes.
    pub fn config_json(&self) -> String {
        match &self.action {
            Action::Query(q) => serde_json::to_string(q).expect("query serializes"),
            Action::Experiment(cfg) => cfg.to_json(),
        }
    }

    /// Run and return the CSV document; writes the graph dump if requested.
    pub fn render(&self) -> Result<String> {
        match &self.action {
            Action::Query(q) => q.render(&self.config_json()),
            Action::Experiment(cfg) => {
                let dump = match &self.dump_graph {
                    Some(path) => Some((path, trial_graph(cfg, 0)?.to_dump())),
                    None => None,
                };
                let csv = run(cfg)?.to_csv();
                if let Some((path, text)) = dump {
                    std::fs::write(path, text)?;
                }
                Ok(csv)
            }
        }
    }

    /// Run, write the CSV to `--out` or `stdout`, and return the exit code.
    /// Errors are reported on `stderr`.
    pub fn execute(&self, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
        let result = self.render().and_then(|csv| match &self.out {
            Some(path) => Ok(std::fs::write(path, csv)?),
            None => Ok(stdout.write_all(csv.as_bytes())?),
        });
        match result {
            Ok(()) => 0,
            Err(e) => report_error(&e, stderr),
        }
    }
}

/// Print `error: <reason>: <message>` and return the matching exit code.
pub fn report_error(e: &Error, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {}: {}", e.reason(), e);
    if e.is_usage() {
        2
    } else {
        1
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Invocation::parse(argv) {
        Ok(inv) => inv.execute(stdout, stderr),
        Err(CliError::Clap(e)) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                let first = text.lines().next().unwrap_or_default();
                let msg = first.strip_prefix("error: ").unwrap_or(first);
                writeln!(stderr, "error: usage: {msg}")
            };
            code
        }
        Err(CliError::Invalid(e)) => report_error(&e, stderr),
    }
}

// ---------------------------------------------------------------- queries

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Tabular for Table {
    fn header(&self) -> Vec<&'static str> {
        self.header.clone()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.clone()
    }
}

fn opt_int(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl Query {
    fn validate(&self) -> Result<()> {
        let (p, bits) = match *self {
            Query::Formulas {
                p, precision_bits, ..
            }
            | Query::Bounds {
                p, precision_bits, ..
            } => (p, precision_bits),
        };
        crate::error::check_probability("p", p)?;
        if bits < 64 {
            return Err(Error::validation(
                "precision-bits",
                format!("{bits} bits is below the minimum of 64"),
            ));
        }
        if let Query::Bounds {
            n_side, n, r, s, ..
        } = *self
        {
            let ok = matches!(
                (n_side, n, r, s),
                (Some(_), None, None, None)
                    | (None, None, Some(_), Some(_))
                    | (None, Some(_), Some(_), None)
            );
            if !ok {
                return Err(Error::validation(
                    "bounds",
                    "give exactly one of --N, --r with --s, or --n with --r",
                ));
            }
        }
        Ok(())
    }

    fn render(&self, config_json: &str) -> Result<String> {
        let table = match *self {
            Query::Formulas {
                n,
                p,
                precision_bits,
            } => {
                let t = tail_bounds(n, p, precision_bits)?;
                let rh = t.r_hat.r_hat;
                Table {
                    header: vec![
                        "n",
                        "p",
                        "r_hat",
                        "predictor",
                        "r_zero",
                        "tau_at_r_hat",
                        "ln_tau_at_r_hat",
                        "ln_expected_below",
                        "ln_expected_at",
                        "markov_lower_tail",
                        "chebyshev_upper_tail",
                        "chebyshev_raw",
                    ],
                    rows: vec![vec![
                        n.to_string(),
                        fmt_num(p),
                        rh.to_string(),
                        fmt_num(t.r_hat.predictor),
                        r_zero(n, p, rh).to_string(),
                        fmt_num(tau(n, p, rh)),
                        fmt_num(ln_tau(n, p, rh)),
                        fmt_num(t.r_hat.ln_expected_below),
                        fmt_num(t.r_hat.ln_expected_at),
                        fmt_num(t.markov_lower_tail),
                        fmt_num(t.chebyshev_upper_tail),
                        fmt_num(t.chebyshev_raw),
                    ]],
                }
            }
            Query::Bounds {
                n: Some(n),
                r: Some(r),
                p,
                precision_bits,
                ..
            } => {
                let v = variance_exact(n, p, r, precision_bits)?;
                Table {
                    header: vec![
                        "n",
                        "r",
                        "p",
                        "s",
                        "ln_pair_count",
                        "rho",
                        "simple",
                        "composite",
                        "improved_base",
                        "lemma_base",
                        "u_s",
                    ],
                    rows: v
                        .per_s
                        .iter()
                        .map(|o| {
                            vec![
                                n.to_string(),
                                r.to_string(),
                                fmt_num(p),
                                o.s.to_string(),
                                fmt_num(o.ln_pair_count),
                                fmt_num(o.rho),
                                fmt_num(o.simple_bound),
                                fmt_num(o.composite_bound),
                                fmt_num(o.improved_base),
                                fmt_num(o.mutual_lemma_base),
                                fmt_num(o.u_s),
                            ]
                        })
                        .collect(),
                }
            }
            Query::Bounds {
                n_side,
                r,
                s,
                p,
                precision_bits,
                ..
            } => {
                let (mode, exact, label) = match (n_side, r, s) {
                    (Some(n_side), _, _) => (
                        PoissonMode::Bipartite { n_side },
                        exact_no_isolated_prob(n_side, p, precision_bits)?,
                        "bipartite",
                    ),
                    (None, Some(r), Some(s)) => {
                        if s > r {
                            return Err(Error::validation("s", format!("s = {s} exceeds r = {r}")));
                        }
                        (
                            PoissonMode::Overlap { r, s },
                            exact_mutual_dom_prob(r, s, p, precision_bits)?,
                            "overlap",
                        )
                    }
                    _ => unreachable!("validated"),
                };
                let params = poisson_params(mode, p)?;
                let b = poisson_bounds(&params);
                Table {
                    header: vec![
                        "mode",
                        "N",
                        "r",
                        "s",
                        "p",
                        "mu",
                        "delta",
                        "sigma",
                        "upper",
                        "lower_exp",
                        "lower_fkg",
                        "janson_exponent",
                        "exact",
                    ],
                    rows: vec![vec![
                        label.to_string(),
                        opt_int(n_side),
                        opt_int(r),
                        opt_int(s),
                        fmt_num(p),
                        fmt_num(params.mu),
                        fmt_num(params.delta),
                        fmt_num(params.sigma),
                        fmt_num(b.upper),
                        fmt_opt(b.lower_exp),
                        fmt_opt(b.lower_fkg),
                        fmt_num(b.janson_exponent),
                        fmt_num(exact.value),
                    ]],
                }
            }
        };
        Ok(csv_document(config_json, &table))
    }
}
