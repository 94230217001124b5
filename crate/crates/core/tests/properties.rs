//! Invariants checked on random inputs, against brute force where possible.

use domlab::analytics::{
    exact_mutual_dom_prob, exact_no_isolated_prob, log_expected_dom_sets, overlap_term_u,
    poisson_bounds, poisson_params, r_hat, rho_bounds, rho_exact, tau, PoissonMode, RhoMode,
};
use domlab::bits::VertexSet;
use domlab::coupling::{anti_conc_config, BinomialCoupling};
use domlab::domination::{count_dominating_sets, domination_number, is_dominating};
use domlab::graph::{gen_gnp, Graph};
use domlab::harness::{fmt_num, wilson_interval, Experiment, ExperimentConfig};
use domlab::rng::RngStream;
use domlab::stats::z_two_sided;
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let m = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), m).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut e = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[e] {
                        g.add_edge(u, v);
                    }
                    e += 1;
                }
            }
            g
        })
    })
}

/// Dominating sets of every size, by trying all subsets.
fn brute_counts(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let mut counts = vec![0u64; n + 1];
    for mask in 0u32..(1 << n) {
        let s = VertexSet::from_indices(n, (0..n).filter(|&v| mask >> v & 1 == 1));
        if is_dominating(g, &s) {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    counts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_matches_brute_force(g in graph_strategy(11)) {
        let counts = brute_counts(&g);
        let gamma = counts.iter().position(|&c| c > 0).unwrap();
        prop_assert_eq!(domination_number(&g, None).unwrap(), gamma);
        for (r, &c) in counts.iter().enumerate() {
            prop_assert_eq!(count_dominating_sets(&g, r, u64::MAX).unwrap(), c);
        }
    }

    #[test]
    fn upper_hint_is_exact_when_met(g in graph_strategy(10), hint in 0usize..10) {
        let gamma = domination_number(&g, None).unwrap();
        let hinted = domination_number(&g, Some(hint)).unwrap();
        if hinted <= hint {
            prop_assert_eq!(hinted, gamma);
        } else {
            prop_assert!(gamma > hint);
        }
    }

    #[test]
    fn dump_round_trip(g in graph_strategy(20)) {
        prop_assert_eq!(Graph::from_dump(&g.to_dump()).unwrap(), g);
    }

    #[test]
    fn gnp_is_reproducible(n in 1usize..60, p in 0.0f64..=1.0, seed: u64, t: u64) {
        let s = RngStream::new(seed, 3, t);
        prop_assert_eq!(gen_gnp(n, p, s).unwrap(), gen_gnp(n, p, s).unwrap());
    }

    #[test]
    fn r_hat_brackets_threshold(exp in 1.5f64..9.0, p in 0.001f64..0.9) {
        let n = 10f64.powf(exp) as u64;
        prop_assume!(n as f64 * p > 1.5);
        let rh = r_hat(n, p).unwrap();
        let threshold = -(n as f64 * p).ln();
        prop_assert!(log_expected_dom_sets(n, p, rh.r_hat - 1) < threshold);
        prop_assert!(log_expected_dom_sets(n, p, rh.r_hat) >= threshold);
    }

    #[test]
    fn mutual_dom_without_overlap_is_bipartite(r in 1u64..=40, p in 0.02f64..0.98) {
        let a = exact_mutual_dom_prob(r, 0, p, 256).unwrap().value;
        let b = exact_no_isolated_prob(r, p, 256).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn no_isolated_monotone_in_p(n in 1u64..50, p in 0.01f64..0.98, dp in 0.001f64..0.02) {
        let lo = exact_no_isolated_prob(n, p, 256).unwrap().value;
        let hi = exact_no_isolated_prob(n, (p + dp).min(1.0), 256).unwrap().value;
        prop_assert!(lo <= hi + 1e-15);
    }

    #[test]
    fn poisson_sandwich(n in 1u64..80, p in 0.01f64..0.99) {
        let b = poisson_bounds(&poisson_params(PoissonMode::Bipartite { n_side: n }, p).unwrap());
        let exact = exact_no_isolated_prob(n, p, 256).unwrap().value;
        let slack = 1e-12;
        prop_assert!(exact <= b.upper * (1.0 + slack));
        if let (Some(le), Some(lf)) = (b.lower_exp, b.lower_fkg) {
            prop_assert!(le <= lf * (1.0 + slack));
            prop_assert!(lf <= exact * (1.0 + slack));
        }
    }

    #[test]
    fn rho_bounds_hold(n in 4u64..150, r in 1u64..12, s_frac in 0.0f64..=1.0, p in 0.05f64..0.6) {
        prop_assume!(2 * r <= n);
        let s = (s_frac * r as f64).round() as u64;
        let rho = rho_exact(n, p, r, s, 256).unwrap().value;
        let b = rho_bounds(n, p, r, s).unwrap();
        prop_assert!(rho <= b.simple * (1.0 + 1e-12));
        prop_assert!(rho <= b.composite * (1.0 + 1e-12));
    }

    #[test]
    fn full_overlap_term_is_reciprocal_mean(n in 5u64..300, r in 1u64..10, p in 0.05f64..0.7) {
        prop_assume!(r <= n);
        let rho = rho_exact(n, p, r, r, 256).unwrap().value;
        prop_assert!((rho - tau(n, p, r)).abs() <= 1e-12 * tau(n, p, r).max(1e-300));
        let u = overlap_term_u(n, p, r, r, RhoMode::Exact).unwrap();
        let e = log_expected_dom_sets(n, p, r).exp();
        prop_assume!(e.is_finite() && e > 0.0);
        prop_assert!((u * e - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn wilson_contains_estimate(trials in 1u64..10_000, frac in 0.0f64..=1.0, conf in 0.5f64..0.9999) {
        let k = (frac * trials as f64).round() as u64;
        let (lo, hi) = wilson_interval(k, trials, conf);
        let phat = k as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= phat && phat <= hi && hi <= 1.0);
    }

    #[test]
    fn fmt_num_keeps_twelve_digits(x in -1e30f64..1e30) {
        let back: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn coupling_overlap_is_one_minus_tv(m in 1u64..500, p in 0.01f64..0.99, q in 0.01f64..0.99) {
        let c = BinomialCoupling::new(m, p, q).unwrap();
        prop_assert!((c.overlap() + c.tv_distance() - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&c.tv_distance()));
    }

    #[test]
    fn anti_conc_grid_endpoints(n in 20u64..5000, p in 0.01f64..=0.25, eps in 0.01f64..=0.25) {
        prop_assume!(n as f64 * p > 1.0);
        let cfg = anti_conc_config(n, p, eps).unwrap();
        prop_assume!(cfg.grid_size >= 1);
        let pts = cfg.subsample(9);
        prop_assert_eq!(pts[0], 1);
        prop_assert_eq!(*pts.last().unwrap(), cfg.grid_size);
        prop_assert_eq!(cfg.grid_point(1), p);
        prop_assert!(cfg.grid_point(cfg.grid_size) <= 2.0 * p * (1.0 + 1e-12));
    }

    #[test]
    fn config_json_round_trip(n in 1usize..200, p in 0.0f64..=1.0, trials in 1u64..1_000_000, seed: u64) {
        for e in [
            Experiment::Concentration { n, p },
            Experiment::Coupling { n, p, q: 1.0 - p },
            Experiment::Xzero { n_side: n as u64, p },
        ] {
            let cfg = ExperimentConfig::new(e, trials, seed);
            prop_assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        }
    }
}

/// Every edge of G(n,p) appears with frequency p: per-edge z-scores stay
/// inside a 99.99% band and the pooled frequency is within 4 standard
/// errors.
#[test]
fn gnp_edge_frequencies() {
    let (n, p, trials) = (24usize, 0.3, 4000u64);
    let m = n * (n - 1) / 2;
    let mut counts = vec![0u64; m];
    for t in 0..trials {
        let g = gen_gnp(n, p, RngStream::new(11, 99, t)).unwrap();
        let mut e = 0;
        for u in 0..n {
            for v in u + 1..n {
                counts[e] += u64::from(g.has_edge(u, v));
                e += 1;
            }
        }
    }
    let band = z_two_sided(0.9999);
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    for (e, &c) in counts.iter().enumerate() {
        let z = (c as f64 - trials as f64 * p) / sd;
        assert!(z.abs() <= band, "edge {e}: z = {z}");
    }
    let total: u64 = counts.iter().sum();
    let pooled = total as f64 / (trials as f64 * m as f64);
    let se = (p * (1.0 - p) / (trials as f64 * m as f64)).sqrt();
    assert!((pooled - p).abs() <= 4.0 * se, "pooled {pooled}");
}

/// Exhaustive bipartite check for N = 3 at an off-grid p.
#[test]
fn bipartite_enumeration_n3() {
    let (n, p) = (3usize, 0.37f64);
    let mut total = 0.0;
    for mask in 0u32..(1 << 9) {
        let edge = |i: usize, j: usize| mask >> (3 * i + j) & 1 == 1;
        if (0..n).all(|i| (0..n).any(|j| edge(i, j))) && (0..n).all(|j| (0..n).any(|i| edge(i, j)))
        {
            let k = mask.count_ones() as i32;
            total += p.powi(k) * (1.0 - p).powi(9 - k);
        }
    }
    let exact = exact_no_isolated_prob(3, p, 256).unwrap().value;
    assert!((exact - total).abs() < 1e-13, "{exact} vs {total}");
}
