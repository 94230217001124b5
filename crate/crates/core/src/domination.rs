//! Domination predicates, an exact branch-and-bound solver for the
//! domination number, and exhaustive counting of dominating `r`-sets.
//!
//! The solver works on the set-cover view of domination: the universe is
//! the vertex set and vertex `v` offers its closed neighborhood `N[v]`.
//! At every node it branches on the uncovered vertex with the fewest
//! admissible dominators (smallest index on ties). Candidates already
//! tried at an ancestor branch are excluded from later siblings, so every
//! subset is explored at most once.

use crate::bits::{Bits, VertexSet};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default largest `n` the exact solver accepts.
pub const DEFAULT_SOLVER_CAP: usize = 128;
/// Hard upper limit for a raised solver cap.
pub const MAX_SOLVER_CAP: usize = 512;
/// Default limit on subset evaluations for enumeration oracles.
pub const DEFAULT_WORK_CAP: u64 = 100_000_000;

/// True iff every vertex outside `s` has a neighbor in `s`.
pub fn is_dominating(g: &Graph, s: &VertexSet) -> bool {
    let mut covered = s.clone();
    for v in s.iter() {
        covered.union_with(g.row(v));
    }
    covered.len() == g.n()
}

/// True iff every vertex of `B \ A` has a neighbor in `A` and every vertex
/// of `A \ B` has a neighbor in `B`.
pub fn mutually_dominate(g: &Graph, a: &VertexSet, b: &VertexSet) -> bool {
    let reaches = |from: &VertexSet, targets: &VertexSet| {
        let mut hit = VertexSet::empty(g.n());
        for v in from.iter() {
            hit.union_with(g.row(v));
        }
        targets.is_subset(&hit)
    };
    reaches(a, &b.difference(a)) && reaches(b, &a.difference(b))
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Largest accepted vertex count (at most [`MAX_SOLVER_CAP`]).
    pub max_n: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_n: DEFAULT_SOLVER_CAP,
        }
    }
}

/// Exact domination number with the default solver cap.
///
/// With `upper_hint = Some(h)` the search only looks for dominating sets of
/// size at most `h`; the result is exact whenever it is `<= h`, and is
/// some value `> h` otherwise.
pub fn domination_number(g: &Graph, upper_hint: Option<usize>) -> Result<usize> {
    domination_number_with(g, upper_hint, SolverConfig::default())
}

pub fn domination_number_with(
    g: &Graph,
    upper_hint: Option<usize>,
    config: SolverConfig,
) -> Result<usize> {
    let n = g.n();
    let cap = config.max_n.min(MAX_SOLVER_CAP);
    if n == 0 {
        return Err(Error::validation("n", "domination number needs n >= 1"));
    }
    if n > cap {
        return Err(Error::capacity(
            "solver",
            format!("n = {n} exceeds solver cap {cap}"),
        ));
    }
    Ok(match n.div_ceil(64) {
        1 => Search::<1>::new(g).solve(upper_hint),
        2 => Search::<2>::new(g).solve(upper_hint),
        3 | 4 => Search::<4>::new(g).solve(upper_hint),
        _ => Search::<8>::new(g).solve(upper_hint),
    })
}

struct Search<const W: usize> {
    n: usize,
    closed: Vec<Bits<W>>,
    all: Bits<W>,
    best: usize,
    /// Histogram scratch for the lower bound, indexed by gain.
    hist: Vec<u32>,
}

impl<const W: usize> Search<W> {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let closed = (0..n)
            .map(|v| {
                let mut b = Bits::<W>::from_slice(g.row(v));
                b.set(v);
                b
            })
            .collect();
        Search {
            n,
            closed,
            all: Bits::first_n(n),
            best: n,
            hist: vec![0; n + 2],
        }
    }

    /// Greedy cover: repeatedly take the vertex covering the most
    /// uncovered vertices (smallest index on ties).
    fn greedy(&self) -> usize {
        let mut covered = Bits::<W>::ZERO;
        let mut picks = 0;
        while covered != self.all {
            let uncovered = self.all & !covered;
            let mut best_v = 0;
            let mut best_gain = 0;
            for v in 0..self.n {
                let gain = self.closed[v].and_count(&uncovered);
                if gain > best_gain {
                    best_gain = gain;
                    best_v = v;
                }
            }
            covered = covered | self.closed[best_v];
            picks += 1;
        }
        picks
    }

    fn solve(mut self, upper_hint: Option<usize>) -> usize {
        let greedy = self.greedy();
        self.best = match upper_hint {
            Some(h) => greedy.min(h + 1),
            None => greedy,
        };
        self.dfs(Bits::ZERO, Bits::ZERO, 0);
        self.best
    }

    /// Fewest additional picks that could possibly cover `uncount` vertices
    /// given the current per-vertex gains: take gains in decreasing order
    /// until they sum to at least `uncount`.
    fn lower_bound(&mut self, uncovered: &Bits<W>, forbidden: &Bits<W>, uncount: u32) -> usize {
        let mut max_gain = 0usize;
        for v in 0..self.n {
            if forbidden.contains(v) {
                continue;
            }
            let gain = self.closed[v].and_count(uncovered) as usize;
            self.hist[gain] += 1;
            max_gain = max_gain.max(gain);
        }
        let mut need = uncount as usize;
        let mut picks = 0usize;
        let mut gain = max_gain;
        while gain > 0 && need > 0 {
            let c = self.hist[gain] as usize;
            if c > 0 {
                let per = need.div_ceil(gain);
                if per <= c {
                    picks += per;
                    need = 0;
                } else {
                    picks += c;
                    need -= c * gain;
                }
            }
            gain -= 1;
        }
        self.hist[..=max_gain].iter_mut().for_each(|h| *h = 0);
        if need > 0 {
            usize::MAX
        } else {
            picks
        }
    }

    fn dfs(&mut self, covered: Bits<W>, forbidden: Bits<W>, depth: usize) {
        let uncovered = self.all & !covered;
        let uncount = uncovered.count();
        if uncount == 0 {
            self.best = self.best.min(depth);
            return;
        }
        if depth + 1 >= self.best {
            return;
        }
        let lb = self.lower_bound(&uncovered, &forbidden, uncount);
        if lb == usize::MAX || depth + lb >= self.best {
            return;
        }

        let allowed = !forbidden;
        let mut pivot = usize::MAX;
        let mut pivot_options = u32::MAX;
        for u in uncovered.ones() {
            let options = self.closed[u].and_count(&allowed);
            if options < pivot_options {
                pivot_options = options;
                pivot = u;
                if options <= 1 {
                    break;
                }
            }
        }
        if pivot_options == 0 {
            return;
        }

        let mut candidates: Vec<(u32, usize)> = (self.closed[pivot] & allowed)
            .ones()
            .map(|c| (self.closed[c].and_count(&uncovered), c))
            .collect();
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut excluded = forbidden;
        for (_, c) in candidates {
            if depth + 1 >= self.best {
                break;
            }
            self.dfs(covered | self.closed[c], excluded, depth + 1);
            excluded.set(c);
        }
    }
}

/// `C(n, r)` saturating at `u128::MAX`.
pub(crate) fn binomial_u128(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at every step.
        match acc.checked_mul((n - i) as u128) {
            Some(x) => acc = x / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Exact number of dominating sets of size `r`, by enumeration.
///
/// Fails with a capacity error (and no partial answer) when `C(n, r)`
/// exceeds `work_cap`.
pub fn count_dominating_sets(g: &Graph, r: usize, work_cap: u64) -> Result<u64> {
    let n = g.n();
    if r > n {
        return Err(Error::validation("r", format!("r = {r} exceeds n = {n}")));
    }
    let work = binomial_u128(n as u64, r as u64);
    if work > work_cap as u128 {
        return Err(Error::capacity(
            "work",
            format!("C({n},{r}) = {work} exceeds work cap {work_cap}"),
        ));
    }
    if r == 0 {
        return Ok(u64::from(n == 0));
    }
    let closed: Vec<VertexSet> = (0..n).map(|v| g.closed_neighborhood(v)).collect();
    let full = VertexSet::full(n).words().to_vec();
    let words = full.len();
    // stack[d] = union of closed neighborhoods of the first d picks
    let mut stack = vec![vec![0u64; words]; r + 1];
    let mut count = 0u64;
    count_rec(&closed, &full, &mut stack, 0, 0, r, &mut count);
    Ok(count)
}

fn count_rec(
    closed: &[VertexSet],
    full: &[u64],
    stack: &mut [Vec<u64>],
    depth: usize,
    start: usize,
    r: usize,
    count: &mut u64,
) {
    let n = closed.len();
    if depth == r {
        if stack[depth] == full {
            *count += 1;
        }
        return;
    }
    for v in start..=n - (r - depth) {
        let (lo, hi) = stack.split_at_mut(depth + 1);
        for ((dst, src), add) in hi[0].iter_mut().zip(&lo[depth]).zip(closed[v].words()) {
            *dst = src | add;
        }
        count_rec(closed, full, stack, depth + 1, v + 1, r, count);
    }
}
