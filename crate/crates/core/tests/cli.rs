use std::path::PathBuf;
use std::process::{Command, Output};

use domlab::cli::{Action, Invocation};
use domlab::graph::Graph;
use domlab::harness::{trial_graph, Experiment};

/// Run the binary with whitespace-separated `args` and no thread override.
fn domlab(args: &str) -> Output {
    domlab_env(args, None)
}

fn domlab_env(args: &str, threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_domlab"));
    c.args(args.split_whitespace());
    match threads {
        Some(v) => c.env("DOMLAB_THREADS", v),
        None => c.env_remove("DOMLAB_THREADS"),
    };
    c.output().expect("binary runs")
}

fn scratch(name: &str) -> String {
    let dir: PathBuf = std::env::temp_dir().join(format!("domlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config_line(csv: &str) -> &str {
    csv.lines().find(|l| l.starts_with("#config=")).unwrap()
}

#[test]
fn xzero_writes_header_and_one_row() {
    let o = domlab("xzero --N 20 --p 0.2 --trials 2000 --seed 7");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("#version=domlab "));
    assert!(lines[1].starts_with("#config={"));
    assert_eq!(
        lines[2],
        "N,p,trials,seed,est,lo,hi,exact,upper,lower_exp,lower_fkg"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("20,0.2,2000,7,"));
}

#[test]
fn exit_codes_and_reasons() {
    let cases = [
        (
            "concentration --n 300 --p 0.5 --trials 1",
            1,
            "capacity:solver",
        ),
        ("xzero --N 2 --p 1.5 --trials 3", 2, "usage"),
        ("xzero --N 2 --p 0.5 --trials 3 --frobnicate", 2, "usage"),
        (
            "mutual-dom --r 2 --s 3 --p 0.5 --trials 3",
            2,
            "validation:s",
        ),
        ("formulas --n 10 --p 0.01", 2, "domain"),
        (
            "xzero --N 2 --p 0.5 --trials 3 --precision-bits 32",
            2,
            "validation:precision-bits",
        ),
    ];
    for (args, code, reason) in cases {
        let o = domlab(args);
        let err = stderr(&o);
        assert_eq!(o.status.code(), Some(code), "{args}: {err}");
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(
            err.starts_with(&format!("error: {reason}: ")),
            "{args}: {err}"
        );
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (scratch("a.csv"), scratch("b.csv"));
    for (path, threads) in [(&a, 1), (&b, 4)] {
        let o = domlab(&format!(
            "concentration --n 40 --p 0.3 --trials 30 --seed 5 --threads {threads} --out {path}"
        ));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_line_reproduces_run() {
    let text = stdout(&domlab(
        "mutual-dom --r 4 --s 1 --p 0.3 --trials 500 --seed 9",
    ));
    let inv = Invocation::from_config_line(config_line(&text)).unwrap();
    let Action::Experiment(cfg) = &inv.action else {
        panic!("not an experiment")
    };
    assert_eq!(cfg.experiment, Experiment::MutualDom { r: 4, s: 1, p: 0.3 });
    assert_eq!((cfg.trials, cfg.seed), (500, 9));
    assert_eq!(inv.render().unwrap(), text);
}

#[test]
fn dump_graph_matches_trial_zero() {
    let path = scratch("g.txt");
    let o = domlab(&format!(
        "variance --n 9 --r 3 --p 0.4 --trials 20 --seed 3 --dump-graph {path}"
    ));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dumped = Graph::from_dump(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let text = stdout(&o);
    let Action::Experiment(cfg) = Invocation::from_config_line(config_line(&text))
        .unwrap()
        .action
    else {
        panic!("not an experiment")
    };
    assert_eq!(dumped, trial_graph(&cfg, 0).unwrap());
    assert!(text.lines().any(|l| l.split(',').nth(5) == Some("mean")));
}

#[test]
fn threads_env_is_only_a_default() {
    let args = "coupling --n 10 --p 0.2 --q 0.25 --trials 50";
    let base = domlab(args);
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(domlab_env(args, Some("2")).stdout, base.stdout);
    // An unusable environment value is a usage error unless --threads wins.
    assert_eq!(domlab_env(args, Some("lots")).status.code(), Some(2));
    let explicit = domlab_env(&format!("{args} --threads 3"), Some("lots"));
    assert_eq!(explicit.stdout, base.stdout);
}

#[test]
fn analytics_subcommands() {
    let o = domlab("formulas --n 1000000 --p 0.01");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().last().unwrap();
    assert!(row.starts_with("1000000,0.01,537,"), "{row}");

    let text = stdout(&domlab("bounds --N 2 --p 0.5"));
    let row: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(row[0], "bipartite");
    assert_eq!(*row.last().unwrap(), "0.4375");

    // Overlap profile: header plus one row per s in 0..=r.
    let text = stdout(&domlab("bounds --n 10 --r 3 --p 0.4"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 4);
}

#[test]
fn help_lists_every_subcommand() {
    let o = domlab("--help");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for sub in
        "formulas bounds xzero mutual-dom concentration variance coupling anti-conc".split(' ')
    {
        assert!(text.contains(sub), "{sub}");
    }
}
