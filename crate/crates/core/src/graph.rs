//! Graph representations and the seeded samplers for `G(n,p)` and the
//! bipartite model `G(N,N,p)`.
//!
//! Both samplers walk the potential pairs in lexicographic order and jump
//! from edge to edge with geometrically distributed skips drawn from the
//! trial's [`RngStream`]. The same algorithm is used for every `p`, so the
//! output is a pure function of `(size, p, stream)`.

use std::fmt::Write as _;

use rand::Rng;

use crate::bits::{iter_ones, words_for, VertexSet};
use crate::error::{check_probability, Error, Result};
use crate::rng::RngStream;

/// Largest vertex count the samplers accept unless a larger cap is passed.
pub const DEFAULT_MAX_VERTICES: usize = 4096;

/// Simple undirected graph with bit-packed adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let stride = words_for(n);
        Graph {
            n,
            stride,
            adj: vec![0; stride * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Cycle `v0 - v1 - ... - v(n-1) - v0`.
    pub fn cycle(n: usize) -> Self {
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds the edge `uv`. Self-loops are rejected with a panic.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        self.adj[u * self.stride + v / 64] |= 1 << (v % 64);
        self.adj[v * self.stride + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / 64] & (1 << (v % 64)) != 0
    }

    /// Adjacency row of `u` as packed words (bit `v` set iff `uv` is an edge).
    pub fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.stride..(u + 1) * self.stride]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        iter_ones(self.row(u))
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Closed neighborhood `N[u]`.
    pub fn closed_neighborhood(&self, u: usize) -> VertexSet {
        let mut s = VertexSet::from_words(self.n, self.row(u).to_vec());
        s.insert(u);
        s
    }

    /// Serialize in the dump format: a header line `n=<n>` followed by one
    /// lowercase hex line per vertex. Line `u` has `ceil(n/4)` digits; digit
    /// `k` (counting from the left) encodes vertices `4k..4k+3`, with vertex
    /// `4k` as the most significant bit of the digit.
    pub fn to_dump(&self) -> String {
        let digits = self.n.div_ceil(4);
        let mut out = format!("n={}\n", self.n);
        for u in 0..self.n {
            for k in 0..digits {
                let mut nibble = 0u32;
                for b in 0..4 {
                    let v = 4 * k + b;
                    if v < self.n && self.has_edge(u, v) {
                        nibble |= 8 >> b;
                    }
                }
                let _ = write!(out, "{nibble:x}");
            }
            out.push('\n');
        }
        out
    }

    /// Parse the dump format written by [`Graph::to_dump`].
    pub fn from_dump(text: &str) -> Result<Self> {
        let bad = |d: String| Error::validation("graph dump", d);
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(format!("bad header {header:?}")))?;
        let digits = n.div_ceil(4);
        let mut g = Graph::empty(n);
        for u in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing row {u}")))?
                .trim();
            if line.len() != digits {
                return Err(bad(format!(
                    "row {u} has {} digits, expected {digits}",
                    line.len()
                )));
            }
            for (k, ch) in line.chars().enumerate() {
                let nibble = ch
                    .to_digit(16)
                    .filter(|_| !ch.is_ascii_uppercase())
                    .ok_or_else(|| bad(format!("row {u}: bad digit {ch:?}")))?;
                for b in 0..4 {
                    if nibble & (8 >> b) != 0 {
                        let v = 4 * k + b;
                        if v >= n || v == u {
                            return Err(bad(format!("row {u}: invalid bit {v}")));
                        }
                        g.adj[u * g.stride + v / 64] |= 1 << (v % 64);
                    }
                }
            }
        }
        for u in 0..n {
            for v in g.neighbors(u).collect::<Vec<_>>() {
                if !g.has_edge(v, u) {
                    return Err(bad(format!("adjacency not symmetric at ({u},{v})")));
                }
            }
        }
        Ok(g)
    }
}

/// Bipartite graph between left side `{a_0..a_{N-1}}` and right side
/// `{b_0..b_{N-1}}`; only cross edges are representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    side: usize,
    stride: usize,
    biadj: Vec<u64>,
}

impl BipartiteGraph {
    pub fn empty(side: usize) -> Self {
        let stride = words_for(side);
        BipartiteGraph {
            side,
            stride,
            biadj: vec![0; stride * side],
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(
            a < self.side && b < self.side,
            "edge ({a},{b}) out of range"
        );
        self.biadj[a * self.stride + b / 64] |= 1 << (b % 64);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.left_row(a)[b / 64] & (1 << (b % 64)) != 0
    }

    pub fn left_row(&self, a: usize) -> &[u64] {
        &self.biadj[a * self.stride..(a + 1) * self.stride]
    }

    pub fn edge_count(&self) -> usize {
        self.biadj.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Yields the positions `0..total` selected with probability `p` each,
/// in increasing order, using geometric skips.
struct SkipSampler<'a, R: Rng> {
    rng: &'a mut R,
    ln_q: f64,
    next: u64,
    total: u64,
    p: f64,
}

impl<'a, R: Rng> SkipSampler<'a, R> {
    fn new(rng: &'a mut R, p: f64, total: u64) -> Self {
        SkipSampler {
            rng,
            ln_q: (-p).ln_1p(),
            next: 0,
            total,
            p,
        }
    }
}

impl<R: Rng> Iterator for SkipSampler<'_, R> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.p == 0.0 || self.next >= self.total {
            return None;
        }
        // u in (0, 1]; skip = floor(ln u / ln(1-p)) is Geometric(p) on {0,1,..}.
        let u = 1.0 - self.rng.random::<f64>();
        let skip = (u.ln() / self.ln_q).floor();
        // Saturating float-to-int cast; -0.0 and NaN (p = 1, u = 1) map to 0.
        let skip = if skip.is_nan() { 0 } else { skip as u64 };
        let pos = self.next.saturating_add(skip);
        if pos >= self.total {
            self.next = self.total;
            return None;
        }
        self.next = pos + 1;
        Some(pos)
    }
}

/// Sample `G(n,p)` with the default vertex cap.
pub fn gen_gnp(n: usize, p: f64, stream: RngStream) -> Result<Graph> {
    gen_gnp_capped(n, p, stream, DEFAULT_MAX_VERTICES)
}

pub fn gen_gnp_capped(n: usize, p: f64, stream: RngStream, max_vertices: usize) -> Result<Graph> {
    check_probability("p", p)?;
    if n > max_vertices {
        return Err(Error::capacity(
            "graph",
            format!("n = {n} exceeds the vertex cap {max_vertices}"),
        ));
    }
    let mut g = Graph::empty(n);
    if n < 2 {
        return Ok(g);
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let mut rng = stream.rng();
    // Walk (u, v), u < v, in lexicographic order; row u starts at linear
    // index `row_start` and holds n - 1 - u pairs.
    let mut u = 0usize;
    let mut row_start = 0u64;
    let mut row_len = (n - 1) as u64;
    for k in SkipSampler::new(&mut rng, p, total) {
        while k >= row_start + row_len {
            row_start += row_len;
            u += 1;
            row_len -= 1;
        }
        let v = u + 1 + (k - row_start) as usize;
        g.add_edge(u, v);
    }
    Ok(g)
}

/// Sample the bipartite graph `G(N,N,p)` over the `N^2` cross pairs, in
/// row-major order `(a, b)`.
pub fn gen_bipartite(side: usize, p: f64, stream: RngStream) -> Result<BipartiteGraph> {
    check_probability("p", p)?;
    if side > DEFAULT_MAX_VERTICES {
        return Err(Error::capacity(
            "graph",
            format!("N = {side} exceeds the vertex cap {DEFAULT_MAX_VERTICES}"),
        ));
    }
    let mut g = BipartiteGraph::empty(side);
    let total = (side as u64) * (side as u64);
    let mut rng = stream.rng();
    for k in SkipSampler::new(&mut rng, p, total) {
        g.add_edge((k / side as u64) as usize, (k % side as u64) as usize);
    }
    Ok(g)
}

/// Number of vertices (both sides, `2N` in total) without incident edges.
pub fn count_isolated(g: &BipartiteGraph) -> usize {
    let mut right_covered = vec![0u64; g.stride];
    let mut isolated = 0;
    for a in 0..g.side {
        let row = g.left_row(a);
        if row.iter().all(|&w| w == 0) {
            isolated += 1;
        }
        for (c, w) in right_covered.iter_mut().zip(row) {
            *c |= w;
        }
    }
    let right_hit: usize = right_covered.iter().map(|w| w.count_ones() as usize).sum();
    isolated + (g.side - right_hit)
}
