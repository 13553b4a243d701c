//! Graph packing: degree statistics, the sufficient packing conditions, a
//! swap-descent packer, exhaustive oracles, and the relabel-plus-matching
//! packer.
//!
//! Vertices are 1-based everywhere. Bipartite graphs have equal parts
//! `U = W = {1..n}`; an edge is `(u, w)`. Adjacency is kept as `u64`
//! bitsets, so `n ≤ 64`.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::ExecPolicy;
use crate::rational::{frac, serde_q, Q};

pub const MAX_GRAPH_VERTICES: usize = 64;
pub const MAX_EXHAUSTIVE: usize = 8;
pub const DEFAULT_RESTARTS: usize = 8;

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| mask >> i & 1 == 1).map(|i| i + 1)
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_GRAPH_VERTICES {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as i64,
            range: "0..=64",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// A simple undirected graph on `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u64>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Self> {
        Graph::new(r.n, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl Graph {
    /// Edges are normalized to `a < b`, sorted, deduplicated.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        check_n(n)?;
        let mut adj = vec![0u64; n];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::Graph(format!("edge ({a}, {b}) outside 1..={n}")));
            }
            if a == b {
                return Err(Error::Graph(format!("loop at {a}")));
            }
            let (a, b) = (a.min(b), a.max(b));
            adj[a - 1] |= 1 << (b - 1);
            adj[b - 1] |= 1 << (a - 1);
            list.push((a, b));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Graph { n, edges: list, adj })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Graph::new(n, [])
    }

    pub fn complete(n: usize) -> Result<Self> {
        Graph::new(n, (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))))
    }

    /// Disjoint union of cliques with the given sizes, then isolated
    /// vertices up to `n`.
    pub fn cliques(n: usize, sizes: &[usize]) -> Result<Self> {
        let mut edges = Vec::new();
        let mut start = 1;
        for &s in sizes {
            for a in start..start + s {
                for b in a + 1..start + s {
                    edges.push((a, b));
                }
            }
            start += s;
        }
        if start - 1 > n {
            return Err(Error::Graph(format!("cliques need {} vertices", start - 1)));
        }
        Graph::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a - 1] >> (b - 1) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v - 1]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v - 1].count_ones() as usize
    }

    pub fn max_degree(&self) -> usize {
        (1..=self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Image of the graph under `v ↦ perm[v-1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        Graph::new(self.n, self.edges.iter().map(|&(a, b)| (perm[a - 1], perm[b - 1])))
    }
}

/// A bipartite graph with parts `U = W = {1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct BipartiteGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj_u: Vec<u64>,
    adj_w: Vec<u64>,
}

impl TryFrom<RawGraph> for BipartiteGraph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Self> {
        BipartiteGraph::new(r.n, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<BipartiteGraph> for RawGraph {
    fn from(g: BipartiteGraph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl BipartiteGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        check_n(n)?;
        let mut adj_u = vec![0u64; n];
        let mut adj_w = vec![0u64; n];
        for (u, w) in edges {
            if u == 0 || w == 0 || u > n || w > n {
                return Err(Error::Graph(format!("edge ({u}, {w}) outside 1..={n}")));
            }
            adj_u[u - 1] |= 1 << (w - 1);
            adj_w[w - 1] |= 1 << (u - 1);
        }
        Ok(Self::from_rows(n, adj_u, adj_w))
    }

    fn from_rows(n: usize, adj_u: Vec<u64>, adj_w: Vec<u64>) -> Self {
        let edges = (1..=n)
            .flat_map(|u| bits(adj_u[u - 1]).map(move |w| (u, w)))
            .collect();
        BipartiteGraph {
            n,
            edges,
            adj_u,
            adj_w,
        }
    }

    /// Builds from `U`-side neighbor masks (bit `w-1` set for edge `(u, w)`).
    pub fn from_u_masks(n: usize, rows: Vec<u64>) -> Result<Self> {
        check_n(n)?;
        if rows.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: rows.len(),
            });
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if rows.iter().any(|r| r & !full != 0) {
            return Err(Error::Graph("row mask wider than n".into()));
        }
        let mut adj_w = vec![0u64; n];
        for (u, &r) in rows.iter().enumerate() {
            for w in bits(r) {
                adj_w[w - 1] |= 1 << u;
            }
        }
        Ok(Self::from_rows(n, rows, adj_w))
    }

    pub fn empty(n: usize) -> Result<Self> {
        BipartiteGraph::new(n, [])
    }

    pub fn complete(n: usize) -> Result<Self> {
        BipartiteGraph::new(n, (1..=n).flat_map(|u| (1..=n).map(move |w| (u, w))))
    }

    /// Complement within `U × W`.
    pub fn complement(&self) -> Self {
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        Self::from_u_masks(self.n, self.adj_u.iter().map(|r| !r & full).collect())
            .expect("same shape")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in row-major order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.adj_u[u - 1] >> (w - 1) & 1 == 1
    }

    pub fn u_neighbors(&self, u: usize) -> u64 {
        self.adj_u[u - 1]
    }

    pub fn w_neighbors(&self, w: usize) -> u64 {
        self.adj_w[w - 1]
    }

    pub fn u_degrees(&self) -> Vec<usize> {
        self.adj_u.iter().map(|r| r.count_ones() as usize).collect()
    }

    pub fn w_degrees(&self) -> Vec<usize> {
        self.adj_w.iter().map(|r| r.count_ones() as usize).collect()
    }

    pub fn u_max_degree(&self) -> usize {
        self.u_degrees().into_iter().max().unwrap_or(0)
    }

    pub fn w_max_degree(&self) -> usize {
        self.w_degrees().into_iter().max().unwrap_or(0)
    }

    /// Image under `u ↦ u_perm[u-1]`, `w ↦ w_perm[w-1]`.
    pub fn relabel(&self, u_perm: &[usize], w_perm: &[usize]) -> Result<Self> {
        BipartiteGraph::new(
            self.n,
            self.edges
                .iter()
                .map(|&(u, w)| (u_perm[u - 1], w_perm[w - 1])),
        )
    }
}

/// The JSON graph file: `{"kind": "bipartite"|"general", "n": .., "edges": [[a, b], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AnyGraph {
    Bipartite(BipartiteGraph),
    General(Graph),
}

impl AnyGraph {
    pub fn n(&self) -> usize {
        match self {
            AnyGraph::Bipartite(g) => g.n(),
            AnyGraph::General(g) => g.n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DegreeStats {
    /// `d_avg = |E| / n`.
    Bipartite {
        d_u_max: usize,
        d_w_max: usize,
        #[serde(with = "serde_q")]
        d_avg: Q,
    },
    /// `d_avg = 2|E| / n` is the usual average degree; `edges_per_vertex =
    /// |E| / n` is the bipartite-style normalization.
    General {
        d_max: usize,
        #[serde(with = "serde_q")]
        d_avg: Q,
        #[serde(with = "serde_q")]
        edges_per_vertex: Q,
    },
}

fn ratio(a: usize, n: usize) -> Q {
    if n == 0 {
        frac(0, 1)
    } else {
        frac(a as i64, n as i64)
    }
}

pub fn bipartite_degree_stats(g: &BipartiteGraph) -> DegreeStats {
    DegreeStats::Bipartite {
        d_u_max: g.u_max_degree(),
        d_w_max: g.w_max_degree(),
        d_avg: ratio(g.edge_count(), g.n()),
    }
}

pub fn general_degree_stats(g: &Graph) -> DegreeStats {
    DegreeStats::General {
        d_max: g.max_degree(),
        d_avg: ratio(2 * g.edge_count(), g.n()),
        edges_per_vertex: ratio(g.edge_count(), g.n()),
    }
}

pub fn degree_stats(g: &AnyGraph) -> DegreeStats {
    match g {
        AnyGraph::Bipartite(b) => bipartite_degree_stats(b),
        AnyGraph::General(h) => general_degree_stats(h),
    }
}

fn same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::SizeMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// One inequality `lhs ≤ rhs` (or `<` when `strict`). `rhs = None` means +∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionLine {
    pub name: String,
    pub expression: String,
    #[serde(with = "serde_q")]
    pub lhs: Q,
    pub rhs: Option<f64>,
    /// Set when the right-hand side is rational.
    #[serde(with = "crate::rational::serde_q_opt")]
    pub rhs_exact: Option<Q>,
    pub strict: bool,
    pub holds: bool,
}

/// Constants for the improved packing conditions; the log is natural.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovedConstants {
    pub avg_divisor: f64,
    pub w_divisor: f64,
}

impl Default for ImprovedConstants {
    fn default() -> Self {
        ImprovedConstants {
            avg_divisor: 100.0,
            w_divisor: 1000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionVariant {
    Bipartite,
    General,
    Improved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub variant: ConditionVariant,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub constants: Option<ImprovedConstants>,
    pub lines: Vec<ConditionLine>,
    /// All lines hold, i.e. the corresponding lemma guarantees a packing.
    pub holds: bool,
    pub failing: Vec<String>,
}

impl ConditionReport {
    fn new(variant: ConditionVariant, n: usize, constants: Option<ImprovedConstants>, lines: Vec<ConditionLine>) -> Self {
        let failing: Vec<String> = lines
            .iter()
            .filter(|l| !l.holds)
            .map(|l| l.name.clone())
            .collect();
        ConditionReport {
            variant,
            n,
            constants,
            holds: failing.is_empty(),
            failing,
            lines,
        }
    }
}

fn exact_line(name: &str, expression: &str, lhs: Q, rhs: Q, strict: bool) -> ConditionLine {
    let holds = if strict { lhs < rhs } else { lhs <= rhs };
    ConditionLine {
        name: name.into(),
        expression: expression.into(),
        lhs,
        rhs: rhs.to_f64(),
        rhs_exact: Some(rhs),
        strict,
        holds,
    }
}

/// `d^U_max(G₁)·d^W_max(G₂) + d^U_max(G₂)·d^W_max(G₁) ≤ n`.
pub fn bipartite_condition(g1: &BipartiteGraph, g2: &BipartiteGraph) -> Result<ConditionReport> {
    same_n(g1.n(), g2.n())?;
    let lhs = g1.u_max_degree() * g2.w_max_degree() + g2.u_max_degree() * g1.w_max_degree();
    let line = exact_line(
        "bipartite",
        "dU_max(G1)*dW_max(G2) + dU_max(G2)*dW_max(G1) <= n",
        frac(lhs as i64, 1),
        frac(g1.n() as i64, 1),
        false,
    );
    Ok(ConditionReport::new(ConditionVariant::Bipartite, g1.n(), None, vec![line]))
}

/// `d_max(G₁)·d_max(G₂) ≤ n/2`.
pub fn general_condition(g1: &Graph, g2: &Graph) -> Result<ConditionReport> {
    same_n(g1.n(), g2.n())?;
    let line = exact_line(
        "general",
        "d_max(G1)*d_max(G2) <= n/2",
        frac((g1.max_degree() * g2.max_degree()) as i64, 1),
        frac(g1.n() as i64, 2),
        false,
    );
    Ok(ConditionReport::new(ConditionVariant::General, g1.n(), None, vec![line]))
}

/// The three strict inequalities of the improved lemma:
/// `d^U_max(G₁)·d̄(G₂) < n/a`, `d^U_max(G₂)·d̄(G₁) < n/a`, and
/// `d^W_max(Gᵢ) < n/(b·ln n)` for both graphs.
pub fn improved_condition(
    g1: &BipartiteGraph,
    g2: &BipartiteGraph,
    constants: ImprovedConstants,
) -> Result<ConditionReport> {
    same_n(g1.n(), g2.n())?;
    let n = g1.n();
    let avg = |g: &BipartiteGraph| ratio(g.edge_count(), n);
    let a = crate::rational::from_f64(constants.avg_divisor);
    if a <= frac(0, 1) || constants.w_divisor <= 0.0 {
        return Err(Error::Degenerate("improved-condition constants must be positive"));
    }
    let rhs_avg = frac(n as i64, 1) / a;
    let l1 = exact_line(
        "g1_u_degree_times_g2_avg",
        "dU_max(G1)*avg(G2) < n/a",
        frac(g1.u_max_degree() as i64, 1) * avg(g2),
        rhs_avg.clone(),
        true,
    );
    let l2 = exact_line(
        "g2_u_degree_times_g1_avg",
        "dU_max(G2)*avg(G1) < n/a",
        frac(g2.u_max_degree() as i64, 1) * avg(g1),
        rhs_avg,
        true,
    );
    let ln = (n as f64).ln();
    let rhs_w = if ln > 0.0 {
        Some(n as f64 / (constants.w_divisor * ln))
    } else {
        None
    };
    let dw = g1.w_max_degree().max(g2.w_max_degree());
    let l3 = ConditionLine {
        name: "w_degree_cap".into(),
        expression: "max(dW_max(G1), dW_max(G2)) < n/(b*ln n)".into(),
        lhs: frac(dw as i64, 1),
        rhs: rhs_w,
        rhs_exact: None,
        strict: true,
        holds: rhs_w.is_none_or(|r| (dw as f64) < r),
    };
    Ok(ConditionReport::new(
        ConditionVariant::Improved,
        n,
        Some(constants),
        vec![l1, l2, l3],
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PackingResult {
    /// `G₁` relabeled by `(u_perm, w_perm)` shares no edge with `G₂`.
    Packed {
        u_perm: Vec<usize>,
        w_perm: Vec<usize>,
        attempts: usize,
    },
    /// Best labeling found when no swap improves.
    LocalMin {
        u_perm: Vec<usize>,
        w_perm: Vec<usize>,
        overlaps: usize,
        attempts: usize,
    },
    Exhausted { tries: usize },
}

impl PackingResult {
    pub fn is_packed(&self) -> bool {
        matches!(self, PackingResult::Packed { .. })
    }
}

/// Number of edges of `G₁` that land on edges of `G₂` after relabeling.
pub fn overlap_count(
    g1: &BipartiteGraph,
    g2: &BipartiteGraph,
    u_perm: &[usize],
    w_perm: &[usize],
) -> usize {
    g1.edges()
        .iter()
        .filter(|&&(u, w)| g2.has_edge(u_perm[u - 1], w_perm[w - 1]))
        .count()
}

/// Edges of `G₁` mapped into `G₂` by a vertex permutation.
pub fn general_overlap_count(g1: &Graph, g2: &Graph, perm: &[usize]) -> usize {
    g1.edges()
        .iter()
        .filter(|&&(a, b)| g2.has_edge(perm[a - 1], perm[b - 1]))
        .count()
}

fn identity(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

fn image_mask(mask: u64, perm: &[usize]) -> u64 {
    bits(mask).fold(0, |acc, v| acc | 1 << (perm[v - 1] - 1))
}

struct SwapState<'a> {
    g1: &'a BipartiteGraph,
    g2: &'a BipartiteGraph,
    sigma: Vec<usize>,
    tau: Vec<usize>,
}

impl SwapState<'_> {
    /// Overlaps contributed by `u` if it were labeled `label`.
    fn u_cost(&self, u: usize, label: usize) -> u32 {
        (self.g2.u_neighbors(label) & image_mask(self.g1.u_neighbors(u), &self.tau)).count_ones()
    }

    fn w_cost(&self, w: usize, label: usize) -> u32 {
        (self.g2.w_neighbors(label) & image_mask(self.g1.w_neighbors(w), &self.sigma)).count_ones()
    }

    fn improve_u(&mut self) -> bool {
        let n = self.g1.n();
        for a in 1..=n {
            for b in a + 1..=n {
                let (la, lb) = (self.sigma[a - 1], self.sigma[b - 1]);
                let before = self.u_cost(a, la) + self.u_cost(b, lb);
                let after = self.u_cost(a, lb) + self.u_cost(b, la);
                if after < before {
                    self.sigma.swap(a - 1, b - 1);
                    return true;
                }
            }
        }
        false
    }

    fn improve_w(&mut self) -> bool {
        let n = self.g1.n();
        for a in 1..=n {
            for b in a + 1..=n {
                let (la, lb) = (self.tau[a - 1], self.tau[b - 1]);
                let before = self.w_cost(a, la) + self.w_cost(b, lb);
                let after = self.w_cost(a, lb) + self.w_cost(b, la);
                if after < before {
                    self.tau.swap(a - 1, b - 1);
                    return true;
                }
            }
        }
        false
    }

    fn overlaps(&self) -> usize {
        overlap_count(self.g1, self.g2, &self.sigma, &self.tau)
    }

    /// Alternates first-improvement U and W swaps until neither helps.
    fn descend(&mut self) -> usize {
        loop {
            if self.overlaps() == 0 {
                return 0;
            }
            let u = self.improve_u();
            let w = self.improve_w();
            if !u && !w {
                return self.overlaps();
            }
        }
    }
}

pub fn pack_by_swaps(g1: &BipartiteGraph, g2: &BipartiteGraph, seed: u64) -> Result<PackingResult> {
    pack_by_swaps_with(g1, g2, seed, DEFAULT_RESTARTS)
}

/// Swap descent from a seeded random labeling, restarting up to `restarts`
/// more times before reporting the best local minimum.
pub fn pack_by_swaps_with(
    g1: &BipartiteGraph,
    g2: &BipartiteGraph,
    seed: u64,
    restarts: usize,
) -> Result<PackingResult> {
    same_n(g1.n(), g2.n())?;
    let n = g1.n();
    if g1.edge_count() == 0 || g2.edge_count() == 0 {
        return Ok(PackingResult::Packed {
            u_perm: identity(n),
            w_perm: identity(n),
            attempts: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    for attempt in 1..=restarts + 1 {
        let mut sigma = identity(n);
        let mut tau = identity(n);
        sigma.shuffle(&mut rng);
        tau.shuffle(&mut rng);
        let mut st = SwapState { g1, g2, sigma, tau };
        let overlaps = st.descend();
        if overlaps == 0 {
            return Ok(PackingResult::Packed {
                u_perm: st.sigma,
                w_perm: st.tau,
                attempts: attempt,
            });
        }
        if best.as_ref().is_none_or(|b| overlaps < b.0) {
            best = Some((overlaps, st.sigma, st.tau));
        }
    }
    let (overlaps, u_perm, w_perm) = best.expect("at least one attempt");
    Ok(PackingResult::LocalMin {
        u_perm,
        w_perm,
        overlaps,
        attempts: restarts + 1,
    })
}

/// Runs [`pack_by_swaps`] on each pair with seed `seed + index`.
pub fn swap_trials(
    pairs: &[(BipartiteGraph, BipartiteGraph)],
    seed: u64,
    policy: ExecPolicy,
) -> Vec<Result<PackingResult>> {
    policy.map_range(pairs.len(), |i| {
        pack_by_swaps(&pairs[i].0, &pairs[i].1, seed.wrapping_add(i as u64))
    })
}

fn check_exhaustive(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as i64,
            range: "0..=8 for exhaustive packing",
        });
    }
    Ok(())
}

/// Kuhn's augmenting-path matching on `allowed[l]` (bitsets over right
/// vertices, 0-based). Returns `mate_left` or `None`.
fn match_masks(allowed: &[u64]) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    fn augment(
        l: usize,
        allowed: &[u64],
        seen: &mut u64,
        mate_l: &mut [Option<usize>],
        mate_r: &mut [Option<usize>],
    ) -> bool {
        let mut m = allowed[l] & !*seen;
        while m != 0 {
            let r = m.trailing_zeros() as usize;
            m &= m - 1;
            *seen |= 1 << r;
            if mate_r[r].is_none_or(|l2| augment(l2, allowed, seen, mate_l, mate_r)) {
                mate_l[l] = Some(r);
                mate_r[r] = Some(l);
                return true;
            }
        }
        false
    }
    let n = allowed.len();
    let mut mate_l = vec![None; n];
    let mut mate_r = vec![None; n];
    for l in 0..n {
        let mut seen = 0u64;
        augment(l, allowed, &mut seen, &mut mate_l, &mut mate_r);
    }
    (mate_l, mate_r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MatchingOutcome {
    /// `mate[u-1]` is the `W` vertex matched to `u`.
    Perfect { mate: Vec<usize> },
    /// `|N(X)| < |X|`.
    HallViolator { x: Vec<usize>, neighborhood: Vec<usize> },
}

/// Perfect matching of `U` into `W`, or a Hall violator read off the
/// alternating-reachability set of the unmatched `U` vertices.
pub fn perfect_matching(h: &BipartiteGraph) -> MatchingOutcome {
    let n = h.n();
    let allowed: Vec<u64> = (1..=n).map(|u| h.u_neighbors(u)).collect();
    let (mate_l, mate_r) = match_masks(&allowed);
    if mate_l.iter().all(Option::is_some) {
        return MatchingOutcome::Perfect {
            mate: mate_l.iter().map(|m| m.unwrap() + 1).collect(),
        };
    }
    let mut in_x = vec![false; n];
    let mut in_nx = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&u| mate_l[u].is_none()).collect();
    for &u in &stack {
        in_x[u] = true;
    }
    while let Some(u) = stack.pop() {
        for w in bits(allowed[u]).map(|w| w - 1) {
            if !in_nx[w] {
                in_nx[w] = true;
                let u2 = mate_r[w].expect("maximum matching: every reached w is matched");
                if !in_x[u2] {
                    in_x[u2] = true;
                    stack.push(u2);
                }
            }
        }
    }
    MatchingOutcome::HallViolator {
        x: (1..=n).filter(|&u| in_x[u - 1]).collect(),
        neighborhood: (1..=n).filter(|&w| in_nx[w - 1]).collect(),
    }
}

fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    fn rec(k: usize, perm: &mut Vec<usize>, used: &mut u64, n: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if k == n {
            return visit(perm);
        }
        for v in 1..=n {
            if *used >> (v - 1) & 1 == 0 {
                *used |= 1 << (v - 1);
                perm.push(v);
                if rec(k + 1, perm, used, n, visit) {
                    return true;
                }
                perm.pop();
                *used &= !(1 << (v - 1));
            }
        }
        false
    }
    rec(0, &mut Vec::with_capacity(n), &mut 0, n, &mut visit);
}

/// Exhaustive bipartite packing: every `U` relabeling, then a matching test
/// for a compatible `W` relabeling. Returns `(u_perm, w_perm)`.
pub fn pack_exhaustive(
    g1: &BipartiteGraph,
    g2: &BipartiteGraph,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    same_n(g1.n(), g2.n())?;
    let n = g1.n();
    check_exhaustive(n)?;
    if g1.edge_count() == 0 || g2.edge_count() == 0 {
        return Ok(Some((identity(n), identity(n))));
    }
    let full = (1u64 << n) - 1;
    let mut found = None;
    for_each_permutation(n, |sigma| {
        let allowed: Vec<u64> = (1..=n)
            .map(|w| {
                let blocked = bits(g1.w_neighbors(w))
                    .fold(0, |acc, u| acc | g2.u_neighbors(sigma[u - 1]));
                full & !blocked
            })
            .collect();
        let (mate, _) = match_masks(&allowed);
        if mate.iter().all(Option::is_some) {
            let tau = mate.iter().map(|m| m.unwrap() + 1).collect();
            found = Some((sigma.to_vec(), tau));
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// Exhaustive general packing by backtracking over vertex images.
pub fn pack_exhaustive_general(g1: &Graph, g2: &Graph) -> Result<Option<Vec<usize>>> {
    same_n(g1.n(), g2.n())?;
    let n = g1.n();
    check_exhaustive(n)?;
    fn rec(v: usize, perm: &mut Vec<usize>, used: u64, g1: &Graph, g2: &Graph) -> bool {
        let n = g1.n();
        if v > n {
            return true;
        }
        let earlier = g1.neighbors(v) & ((1u64 << (v - 1)) - 1);
        for img in 1..=n {
            if used >> (img - 1) & 1 == 1 {
                continue;
            }
            if bits(earlier).any(|u| g2.has_edge(perm[u - 1], img)) {
                continue;
            }
            perm.push(img);
            if rec(v + 1, perm, used | 1 << (img - 1), g1, g2) {
                return true;
            }
            perm.pop();
        }
        false
    }
    let mut perm = Vec::with_capacity(n);
    Ok(rec(1, &mut perm, 0, g1, g2).then_some(perm))
}

/// The compatibility graph for a fixed `W` relabeling `f` of `G₁`: `(u, u′)`
/// is an edge iff `N_{G₂}(u′) ∩ f(N_{G₁}(u)) = ∅`.
pub fn assignment_graph(g1: &BipartiteGraph, g2: &BipartiteGraph, f: &[usize]) -> Result<BipartiteGraph> {
    same_n(g1.n(), g2.n())?;
    let n = g1.n();
    let rows = (1..=n)
        .map(|u| {
            let img = image_mask(g1.u_neighbors(u), f);
            (1..=n)
                .filter(|&u2| g2.u_neighbors(u2) & img == 0)
                .fold(0u64, |acc, u2| acc | 1 << (u2 - 1))
        })
        .collect();
    BipartiteGraph::from_u_masks(n, rows)
}

fn min_degree(h: &BipartiteGraph) -> usize {
    h.u_degrees()
        .into_iter()
        .chain(h.w_degrees())
        .min()
        .unwrap_or(0)
}

/// Random `W` relabeling plus a perfect matching in the assignment graph.
/// When the assignment graph has minimum degree at least `n/2`, a perfect
/// matching is known to exist; the engine is still run to produce it.
pub fn pack_by_random_matching(
    g1: &BipartiteGraph,
    g2: &BipartiteGraph,
    seed: u64,
    max_tries: usize,
) -> Result<PackingResult> {
    same_n(g1.n(), g2.n())?;
    let n = g1.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_tries {
        let mut f = identity(n);
        f.shuffle(&mut rng);
        let h = assignment_graph(g1, g2, &f)?;
        let guaranteed = 2 * min_degree(&h) >= n;
        match perfect_matching(&h) {
            MatchingOutcome::Perfect { mate } => {
                return Ok(PackingResult::Packed {
                    u_perm: mate,
                    w_perm: f,
                    attempts: attempt,
                })
            }
            MatchingOutcome::HallViolator { .. } => {
                debug_assert!(!guaranteed, "min-degree ≥ n/2 graph without a perfect matching");
            }
        }
    }
    Ok(PackingResult::Exhausted { tries: max_tries })
}
