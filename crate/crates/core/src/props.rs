//! Graph properties as Boolean functions of the edge variables, extremal
//! graph search, and the packing-based lower-bound pipeline at fixed `n`.
//!
//! Edge variables are indexed lexicographically over pairs `(a, b)`,
//! `a < b`, for general graphs and row-major over `U × W` for bipartite
//! ones.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boolfn::{Invariance, PermutationGroup, TruthTable};
use crate::det::MAX_EXACT_VARS;
use crate::error::{Error, Result};
use crate::packing::{
    bipartite_condition, bipartite_degree_stats, improved_condition, pack_exhaustive, perfect_matching,
    BipartiteGraph, ConditionReport, DegreeStats, Graph, ImprovedConstants, MatchingOutcome,
};
use crate::rational::{frac, serde_q, Q};

pub type GeneralPredicate = Arc<dyn Fn(&Graph) -> bool + Send + Sync>;
pub type BipartitePredicate = Arc<dyn Fn(&BipartiteGraph) -> bool + Send + Sync>;

/// Largest part size for the exhaustive bipartite searches.
pub const MAX_SEARCH_PARTS: usize = 4;
/// Largest vertex count for [`quadratic_bound_witness`].
pub const MAX_WITNESS_VERTICES: usize = 12;

#[derive(Clone)]
enum Predicate {
    General { v: usize, pred: GeneralPredicate },
    Bipartite { n: usize, pred: BipartitePredicate },
}

/// A named graph property on a fixed vertex set.
#[derive(Clone)]
pub struct PropertyOracle {
    name: String,
    predicate: Predicate,
}

impl fmt::Debug for PropertyOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.predicate {
            Predicate::General { v, .. } => write!(f, "PropertyOracle({}, general v={v})", self.name),
            Predicate::Bipartite { n, .. } => {
                write!(f, "PropertyOracle({}, bipartite {n}x{n})", self.name)
            }
        }
    }
}

impl PropertyOracle {
    pub fn general(
        name: impl Into<String>,
        v: usize,
        pred: impl Fn(&Graph) -> bool + Send + Sync + 'static,
    ) -> Self {
        PropertyOracle {
            name: name.into(),
            predicate: Predicate::General {
                v,
                pred: Arc::new(pred),
            },
        }
    }

    pub fn bipartite(
        name: impl Into<String>,
        n: usize,
        pred: impl Fn(&BipartiteGraph) -> bool + Send + Sync + 'static,
    ) -> Self {
        PropertyOracle {
            name: name.into(),
            predicate: Predicate::Bipartite {
                n,
                pred: Arc::new(pred),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self.predicate, Predicate::Bipartite { .. })
    }

    /// Vertex count `v` (general) or part size `n` (bipartite).
    pub fn size(&self) -> usize {
        match self.predicate {
            Predicate::General { v, .. } => v,
            Predicate::Bipartite { n, .. } => n,
        }
    }

    pub fn edge_variables(&self) -> usize {
        match self.predicate {
            Predicate::General { v, .. } => v * v.saturating_sub(1) / 2,
            Predicate::Bipartite { n, .. } => n * n,
        }
    }

    /// Evaluates on a general graph of any size.
    pub fn eval_general(&self, g: &Graph) -> Result<bool> {
        match &self.predicate {
            Predicate::General { pred, .. } => Ok(pred(g)),
            Predicate::Bipartite { .. } => Err(Error::Graph("bipartite property given a general graph".into())),
        }
    }

    pub fn eval_bipartite(&self, g: &BipartiteGraph) -> Result<bool> {
        match &self.predicate {
            Predicate::Bipartite { pred, .. } => Ok(pred(g)),
            Predicate::General { .. } => Err(Error::Graph("general property given a bipartite graph".into())),
        }
    }

    /// The property `G ↦ ¬P(Ḡ)`, monotone whenever `P` is.
    pub fn complement_dual(&self) -> Result<PropertyOracle> {
        match &self.predicate {
            Predicate::Bipartite { n, pred } => {
                let pred = pred.clone();
                Ok(PropertyOracle::bipartite(
                    format!("dual({})", self.name),
                    *n,
                    move |g| !pred(&g.complement()),
                ))
            }
            Predicate::General { .. } => Err(Error::Graph("complement dual is defined for bipartite oracles".into())),
        }
    }

    fn bipartite_parts(&self) -> Result<(usize, &BipartitePredicate)> {
        match &self.predicate {
            Predicate::Bipartite { n, pred } => Ok((*n, pred)),
            Predicate::General { .. } => Err(Error::Graph("bipartite oracle required".into())),
        }
    }
}

/// `(a, b)` pairs in variable order.
pub fn general_edge_order(v: usize) -> Vec<(usize, usize)> {
    (1..=v).flat_map(|a| (a + 1..=v).map(move |b| (a, b))).collect()
}

pub fn bipartite_edge_order(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|u| (1..=n).map(move |w| (u, w))).collect()
}

/// Graph whose edge `i` (0-based variable order) is present iff bit `i` of `a`.
pub fn general_graph_of_index(v: usize, a: usize) -> Graph {
    let edges = general_edge_order(v)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| a >> i & 1 == 1)
        .map(|(_, e)| e);
    Graph::new(v, edges).expect("pairs are in range")
}

pub fn bipartite_graph_of_index(n: usize, a: usize) -> BipartiteGraph {
    let full = (1u64 << n) - 1;
    let rows = (0..n).map(|u| (a >> (u * n)) as u64 & full).collect();
    BipartiteGraph::from_u_masks(n, rows).expect("rows fit")
}

fn transposition_generators(v: usize, edges: &[(usize, usize)], index_of: impl Fn(usize, usize) -> usize) -> Vec<Vec<usize>> {
    let mut gens = Vec::new();
    for i in 1..=v {
        for j in i + 1..=v {
            let swap = |x: usize| {
                if x == i {
                    j
                } else if x == j {
                    i
                } else {
                    x
                }
            };
            gens.push(edges.iter().map(|&(a, b)| index_of(swap(a), swap(b)) + 1).collect());
        }
    }
    gens
}

/// Edge-permutation generators induced by every vertex transposition
/// (within each side, for bipartite oracles).
pub fn relabeling_group(oracle: &PropertyOracle) -> Result<PermutationGroup> {
    let m = oracle.edge_variables();
    let gens = match oracle.predicate {
        Predicate::General { v, .. } => {
            let edges = general_edge_order(v);
            let index_of = |a: usize, b: usize| {
                let (a, b) = (a.min(b), a.max(b));
                edges.iter().position(|&e| e == (a, b)).expect("edge exists")
            };
            transposition_generators(v, &edges, index_of)
        }
        Predicate::Bipartite { n, .. } => {
            let edges = bipartite_edge_order(n);
            let mut gens = Vec::new();
            for i in 1..=n {
                for j in i + 1..=n {
                    let sw = |x: usize| if x == i { j } else if x == j { i } else { x };
                    gens.push(edges.iter().map(|&(u, w)| (sw(u) - 1) * n + w).collect());
                    gens.push(edges.iter().map(|&(u, w)| (u - 1) * n + sw(w)).collect());
                }
            }
            gens
        }
    };
    PermutationGroup::new(m, gens)
}

/// The property as a function of its edge variables, gated on
/// label-invariance.
pub fn property_to_function(oracle: &PropertyOracle) -> Result<TruthTable> {
    let m = oracle.edge_variables();
    if m == 0 || m > MAX_EXACT_VARS {
        return Err(Error::VariableCount {
            n: m,
            max: MAX_EXACT_VARS,
        });
    }
    let f = match &oracle.predicate {
        Predicate::General { v, pred } => TruthTable::from_fn(m, |a| pred(&general_graph_of_index(*v, a)))?,
        Predicate::Bipartite { n, pred } => TruthTable::from_fn(m, |a| pred(&bipartite_graph_of_index(*n, a)))?,
    };
    let Invariance { invariant, .. } = f.invariance(&relabeling_group(oracle)?)?;
    if !invariant {
        return Err(Error::NotAGraphProperty);
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: &'static str,
    pub sizes: &'static str,
    pub description: &'static str,
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "has-edge",
        kind: "general",
        sizes: "v >= 2",
        description: "at least one edge",
    },
    CatalogEntry {
        name: "connected",
        kind: "general",
        sizes: "v >= 2",
        description: "the graph is connected",
    },
    CatalogEntry {
        name: "no-isolated-vertex",
        kind: "general",
        sizes: "v >= 2",
        description: "every vertex has positive degree",
    },
    CatalogEntry {
        name: "has-triangle",
        kind: "general",
        sizes: "v >= 3",
        description: "contains a 3-cycle",
    },
    CatalogEntry {
        name: "bip-has-edge",
        kind: "bipartite",
        sizes: "n >= 1",
        description: "at least one U-W edge",
    },
    CatalogEntry {
        name: "bip-perfect-matching",
        kind: "bipartite",
        sizes: "n >= 1",
        description: "contains a perfect matching",
    },
    CatalogEntry {
        name: "bip-no-isolated-u",
        kind: "bipartite",
        sizes: "n >= 1",
        description: "every U vertex has an edge (the row function)",
    },
    CatalogEntry {
        name: "bip-u-star-2",
        kind: "bipartite",
        sizes: "n >= 2",
        description: "some U vertex has degree at least 2",
    },
];

pub fn builtin_properties() -> &'static [CatalogEntry] {
    CATALOG
}

fn connected(g: &Graph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let mut next = 0u64;
        for v in (0..n).filter(|&v| frontier >> v & 1 == 1) {
            next |= g.neighbors(v + 1);
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen.count_ones() as usize == n
}

fn has_triangle(g: &Graph) -> bool {
    g.edges()
        .iter()
        .any(|&(a, b)| g.neighbors(a) & g.neighbors(b) != 0)
}

/// Looks up a catalog property at size `v` (general) or `n` (bipartite).
pub fn property_by_name(name: &str, size: usize) -> Result<PropertyOracle> {
    let o = match name {
        "has-edge" => PropertyOracle::general(name, size, |g| g.edge_count() > 0),
        "connected" => PropertyOracle::general(name, size, connected),
        "no-isolated-vertex" => PropertyOracle::general(name, size, |g| (1..=g.n()).all(|v| g.degree(v) > 0)),
        "has-triangle" => PropertyOracle::general(name, size, has_triangle),
        "bip-has-edge" => PropertyOracle::bipartite(name, size, |g| g.edge_count() > 0),
        "bip-perfect-matching" => PropertyOracle::bipartite(name, size, |g| {
            matches!(perfect_matching(g), MatchingOutcome::Perfect { .. })
        }),
        "bip-no-isolated-u" => PropertyOracle::bipartite(name, size, |g| g.u_degrees().iter().all(|&d| d > 0)),
        "bip-u-star-2" => PropertyOracle::bipartite(name, size, |g| g.u_degrees().iter().any(|&d| d >= 2)),
        _ => return Err(Error::UnknownProperty(name.into())),
    };
    Ok(o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    U,
    W,
}

fn check_parts(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SEARCH_PARTS {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as i64,
            range: "1..=4",
        });
    }
    Ok(())
}

/// The graph in the property whose `side`-degree sequence, sorted
/// descending, is lexicographically smallest; ties go to the
/// lexicographically smallest edge-index list.
pub fn minimal_graph_search(oracle: &PropertyOracle, side: Side) -> Result<BipartiteGraph> {
    let (n, pred) = oracle.bipartite_parts()?;
    check_parts(n)?;
    let m = n * n;
    let mut best: Option<(Vec<usize>, Vec<usize>, BipartiteGraph)> = None;
    let mut members = 0usize;
    for a in 0..1usize << m {
        let g = bipartite_graph_of_index(n, a);
        if !pred(&g) {
            continue;
        }
        members += 1;
        let mut degs = match side {
            Side::U => g.u_degrees(),
            Side::W => g.w_degrees(),
        };
        degs.sort_unstable_by(|x, y| y.cmp(x));
        let edge_ids: Vec<usize> = (0..m).filter(|i| a >> i & 1 == 1).collect();
        let better = match &best {
            None => true,
            Some((d, e, _)) => (&degs, &edge_ids) < (d, e),
        };
        if better {
            best = Some((degs, edge_ids, g));
        }
    }
    if members == 0 || members == 1 << m {
        return Err(Error::TrivialProperty);
    }
    Ok(best.expect("nonempty").2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YaoQuantity {
    pub graph: &'static str,
    pub side: Side,
    pub d_max: usize,
    #[serde(with = "serde_q")]
    pub d_avg: Q,
    /// `n · d_max / d̄`.
    #[serde(with = "serde_q")]
    pub with_factor_n: Q,
    /// `d_max / d̄`.
    #[serde(with = "serde_q")]
    pub without_factor_n: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedBounds {
    /// `(c² n⁵ / 2)^{1/4}`.
    pub five_quarters: f64,
    /// `(c n⁴ / a)^{1/3}`.
    pub four_thirds: f64,
    /// `n^{3/2} / √(ln n)`; absent at `n = 1`.
    pub three_halves_log: Option<f64>,
    pub float_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsFlag {
    pub c: u32,
    pub avg_divisor: f64,
    pub w_divisor: f64,
    pub log: &'static str,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub property: String,
    pub n: usize,
    pub g1: BipartiteGraph,
    pub g2: BipartiteGraph,
    pub g1_stats: DegreeStats,
    pub g2_stats: DegreeStats,
    /// `pack_exhaustive(G₁, G₂)` found no packing.
    pub non_packing_verified: bool,
    pub g1_upward_closed: bool,
    pub trivial_bound_g1: usize,
    pub trivial_bound_g2: usize,
    pub yao: Vec<YaoQuantity>,
    pub combined: CombinedBounds,
    pub bipartite_condition: ConditionReport,
    pub improved_condition: ConditionReport,
    pub constants_flag: ConstantsFlag,
}

fn yao_quantities(g: &BipartiteGraph, label: &'static str) -> Vec<YaoQuantity> {
    let n = g.n();
    let avg = frac(g.edge_count() as i64, n as i64);
    [(Side::U, g.u_max_degree()), (Side::W, g.w_max_degree())]
        .into_iter()
        .map(|(side, d)| {
            let without = frac(d as i64, 1) / &avg;
            YaoQuantity {
                graph: label,
                side,
                d_max: d,
                d_avg: avg.clone(),
                with_factor_n: &without * frac(n as i64, 1),
                without_factor_n: without,
            }
        })
        .collect()
}

/// Every supergraph of `g` satisfies the property.
fn upward_closed(n: usize, pred: &BipartitePredicate, g: &BipartiteGraph) -> bool {
    let m = n * n;
    let base: usize = g.edges().iter().map(|&(u, w)| 1usize << ((u - 1) * n + (w - 1))).sum();
    let rest = ((1usize << m) - 1) & !base;
    let mut sub = rest;
    loop {
        if !pred(&bipartite_graph_of_index(n, base | sub)) {
            return false;
        }
        if sub == 0 {
            return true;
        }
        sub = (sub - 1) & rest;
    }
}

/// Extremal graphs, their non-packing, and every bound ingredient at this
/// `n`, with all hidden constants set to 1.
pub fn lower_bound_pipeline(oracle: &PropertyOracle) -> Result<PipelineReport> {
    let (n, pred) = oracle.bipartite_parts()?;
    check_parts(n)?;
    let g1 = minimal_graph_search(oracle, Side::U)?;
    let g2 = minimal_graph_search(&oracle.complement_dual()?, Side::U)?;
    let non_packing_verified = pack_exhaustive(&g1, &g2)?.is_none();
    let constants = ImprovedConstants::default();
    let nf = n as f64;
    let ln = nf.ln();
    let mut yao = yao_quantities(&g1, "G1");
    yao.extend(yao_quantities(&g2, "G2"));
    Ok(PipelineReport {
        property: oracle.name().to_string(),
        n,
        g1_stats: bipartite_degree_stats(&g1),
        g2_stats: bipartite_degree_stats(&g2),
        non_packing_verified,
        g1_upward_closed: upward_closed(n, pred, &g1),
        trivial_bound_g1: g1.edge_count(),
        trivial_bound_g2: g2.edge_count(),
        yao,
        combined: CombinedBounds {
            five_quarters: (nf.powi(5) / 2.0).powf(0.25),
            four_thirds: (nf.powi(4) / constants.avg_divisor).cbrt(),
            three_halves_log: (ln > 0.0).then(|| nf.powf(1.5) / ln.sqrt()),
            float_tolerance: 1e-12,
        },
        bipartite_condition: bipartite_condition(&g1, &g2)?,
        improved_condition: improved_condition(&g1, &g2, constants)?,
        constants_flag: ConstantsFlag {
            c: 1,
            avg_divisor: constants.avg_divisor,
            w_divisor: constants.w_divisor,
            log: "natural",
            note: "asymptotic constants replaced by c = 1; values are raw ingredients at this n, not bounds",
        },
        g1,
        g2,
    })
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Smallest prime `p` with `v/2 < p < 2v/3`.
pub fn prime_in_range(v: usize) -> Option<usize> {
    (v / 2 + 1..).take_while(|&p| 3 * p < 2 * v).find(|&p| is_prime(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticCase {
    /// `f(K_S) = 1`: restrict to the edges inside `S`.
    Case1,
    /// `f(K_S) = 0`, `f(H) = 1`: restrict to the cut `S × (V∖S)`.
    Case2_1,
    /// `f(K_S) = 0`, `f(H) = 0`: fix `H` present, restrict to `S`.
    Case2_2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticWitness {
    pub property: String,
    pub v: usize,
    pub p: usize,
    pub s: Vec<usize>,
    pub f_k_s: bool,
    pub f_k_rest: bool,
    pub f_h: bool,
    pub case: QuadraticCase,
    /// Fixed edges `(a, b, value)`; all other edges are free.
    pub fixed: Vec<(usize, usize, bool)>,
    pub free_edges: Vec<(usize, usize)>,
    /// `C(p, 2)` or `p(v − p)`.
    pub promised_size: usize,
    /// `(v² − v)/8` or `2v²/9`, which the promised size dominates.
    #[serde(with = "serde_q")]
    pub promised_floor: Q,
    pub restricted_at_zero: bool,
    pub restricted_at_one: bool,
}

impl QuadraticWitness {
    pub fn nontrivial(&self) -> bool {
        self.restricted_at_zero != self.restricted_at_one
    }
}

/// Classifies a monotone nontrivial property at `v` vertices by the values
/// on `K_S` and `H = K_{V∖S} ∪ S×(V∖S)` for a prime `|S| = p` in
/// `(v/2, 2v/3)`, returning the restriction each case uses.
pub fn quadratic_bound_witness(oracle: &PropertyOracle, v: usize) -> Result<QuadraticWitness> {
    if oracle.is_bipartite() {
        return Err(Error::Graph("general oracle required".into()));
    }
    if !(2..=MAX_WITNESS_VERTICES).contains(&v) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v as i64,
            range: "2..=12",
        });
    }
    let f = |edges: &[(usize, usize)]| oracle.eval_general(&Graph::new(v, edges.iter().copied())?);
    let all = general_edge_order(v);
    if f(&[])? || !f(&all)? {
        return Err(Error::TrivialProperty);
    }
    let p = prime_in_range(v).ok_or(Error::NoPrimeInRange { lo: v, hi: 2 * v })?;
    let in_s = |x: usize| x <= p;
    let inside: Vec<_> = all.iter().copied().filter(|&(a, b)| in_s(a) && in_s(b)).collect();
    let rest: Vec<_> = all.iter().copied().filter(|&(a, b)| !in_s(a) && !in_s(b)).collect();
    let cut: Vec<_> = all.iter().copied().filter(|&(a, b)| in_s(a) != in_s(b)).collect();
    let h: Vec<_> = rest.iter().chain(&cut).copied().collect();
    let (f_k_s, f_k_rest, f_h) = (f(&inside)?, f(&rest)?, f(&h)?);

    fn pairs(es: &[(usize, usize)], val: bool) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        es.iter().map(move |&(a, b)| (a, b, val))
    }
    let vq = v as i64;
    let (case, fixed, free, at_zero, at_one, floor): (_, Vec<_>, _, _, _, Q) = if f_k_s {
        let fixed = pairs(&rest, false).chain(pairs(&cut, false)).collect();
        (QuadraticCase::Case1, fixed, inside, f(&[])?, f_k_s, frac(vq * vq - vq, 8))
    } else if f_h {
        let fixed = pairs(&inside, false).chain(pairs(&rest, true)).collect();
        (QuadraticCase::Case2_1, fixed, cut, f_k_rest, f_h, frac(2 * vq * vq, 9))
    } else {
        let fixed = pairs(&h, true).collect();
        (QuadraticCase::Case2_2, fixed, inside, f_h, f(&all)?, frac(vq * vq - vq, 8))
    };
    let mut fixed: Vec<(usize, usize, bool)> = fixed;
    fixed.sort_unstable();
    Ok(QuadraticWitness {
        property: oracle.name().to_string(),
        v,
        p,
        s: (1..=p).collect(),
        f_k_s,
        f_k_rest,
        f_h,
        case,
        fixed,
        promised_size: free.len(),
        free_edges: free,
        promised_floor: floor,
        restricted_at_zero: at_zero,
        restricted_at_one: at_one,
    })
}

/// `true` when the promised size is at least its floor.
pub fn witness_floor_holds(w: &QuadraticWitness) -> bool {
    frac(w.promised_size as i64, 1) >= w.promised_floor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::decision_depth;

    #[test]
    fn has_edge_is_or() {
        let f = property_to_function(&property_by_name("has-edge", 3).unwrap()).unwrap();
        assert_eq!(f, TruthTable::or_all(3).unwrap());
    }

    #[test]
    fn catalog_passes_invariance_gate() {
        assert!(builtin_properties().len() >= 6);
        for e in builtin_properties() {
            let size = if e.kind == "general" { 4 } else { 3 };
            let o = property_by_name(e.name, size).unwrap();
            let f = property_to_function(&o).unwrap();
            assert!(f.is_monotone(), "{}", e.name);
            assert!(!f.is_constant(), "{}", e.name);
        }
        assert!(matches!(
            property_by_name("nope", 3),
            Err(Error::UnknownProperty(_))
        ));
    }

    #[test]
    fn labeled_predicate_is_rejected() {
        let o = PropertyOracle::general("edge-12", 4, |g| g.has_edge(1, 2));
        assert_eq!(property_to_function(&o), Err(Error::NotAGraphProperty));
        let o = PropertyOracle::bipartite("u1-busy", 3, |g| g.u_neighbors(1) != 0);
        assert_eq!(property_to_function(&o), Err(Error::NotAGraphProperty));
    }

    #[test]
    fn evasive_at_four_vertices() {
        for name in ["connected", "no-isolated-vertex"] {
            let f = property_to_function(&property_by_name(name, 4).unwrap()).unwrap();
            assert_eq!(f.n(), 6);
            assert_eq!(decision_depth(&f).unwrap().depth, 6, "{name}");
        }
    }

    #[test]
    fn bipartite_catalog_is_evasive() {
        for e in builtin_properties().iter().filter(|e| e.kind == "bipartite") {
            for n in 2..=3 {
                let f = property_to_function(&property_by_name(e.name, n).unwrap()).unwrap();
                if f.is_constant() {
                    continue;
                }
                assert_eq!(decision_depth(&f).unwrap().depth, n * n, "{} n={n}", e.name);
            }
        }
    }

    #[test]
    fn minimal_graphs() {
        let g = minimal_graph_search(&property_by_name("bip-has-edge", 3).unwrap(), Side::U).unwrap();
        assert_eq!(g.edges(), &[(1, 1)]);
        let g = minimal_graph_search(&property_by_name("bip-u-star-2", 3).unwrap(), Side::U).unwrap();
        assert_eq!(g.u_degrees(), vec![2, 0, 0]);
        let all = PropertyOracle::bipartite("all", 2, |_| true);
        assert_eq!(minimal_graph_search(&all, Side::U), Err(Error::TrivialProperty));
        let none = PropertyOracle::bipartite("none", 2, |_| false);
        assert_eq!(lower_bound_pipeline(&none).unwrap_err(), Error::TrivialProperty);
    }

    #[test]
    fn has_edge_pipeline() {
        let r = lower_bound_pipeline(&property_by_name("bip-has-edge", 3).unwrap()).unwrap();
        assert_eq!(r.g1.edge_count(), 1);
        assert_eq!(r.g2, BipartiteGraph::complete(3).unwrap());
        assert!(r.non_packing_verified);
        assert!(r.g1_upward_closed);
        let q = &r.yao[0];
        assert_eq!((q.graph, q.side), ("G1", Side::U));
        assert_eq!(q.with_factor_n, frac(9, 1));
        assert_eq!(q.without_factor_n, frac(3, 1));
        assert!(!r.bipartite_condition.holds);
        assert!(!r.improved_condition.holds);
        assert_eq!(r.constants_flag.c, 1);
    }

    #[test]
    fn pipelines_never_pack() {
        for e in builtin_properties().iter().filter(|e| e.kind == "bipartite") {
            for n in 2..=3 {
                let r = lower_bound_pipeline(&property_by_name(e.name, n).unwrap()).unwrap();
                assert!(r.non_packing_verified, "{} n={n}", e.name);
                assert!(r.g1_upward_closed);
                assert!(!r.bipartite_condition.holds);
            }
        }
    }

    #[test]
    fn primes() {
        assert_eq!(prime_in_range(12), Some(7));
        assert_eq!(prime_in_range(7), None);
        let o = property_by_name("connected", 7).unwrap();
        assert_eq!(
            quadratic_bound_witness(&o, 7).unwrap_err(),
            Error::NoPrimeInRange { lo: 7, hi: 14 }
        );
        // Brute-force cross-check of the scan.
        for v in 2..60 {
            let brute = (1..v).find(|&p| 2 * p > v && 3 * p < 2 * v && (2..p).all(|d| p % d != 0) && p > 1);
            assert_eq!(prime_in_range(v), brute, "v={v}");
        }
    }

    #[test]
    fn quadratic_witness_cases() {
        let w = quadratic_bound_witness(&property_by_name("connected", 12).unwrap(), 12).unwrap();
        assert_eq!(w.p, 7);
        // K_7 plus five isolated vertices is disconnected; H is connected.
        assert_eq!(w.case, QuadraticCase::Case2_1);
        assert_eq!(w.promised_size, 35);
        assert!(w.nontrivial());
        assert!(witness_floor_holds(&w));
        assert_eq!(w.fixed.len() + w.free_edges.len(), 66);

        let w = quadratic_bound_witness(&property_by_name("has-edge", 12).unwrap(), 12).unwrap();
        assert_eq!(w.case, QuadraticCase::Case1);
        assert_eq!(w.promised_size, 21);
        assert!(w.nontrivial());

        let w = quadratic_bound_witness(&property_by_name("has-triangle", 12).unwrap(), 12).unwrap();
        assert_eq!(w.case, QuadraticCase::Case1);

        // Minimum degree ≥ 7 holds on neither K_S nor H (S has degree 5 in H).
        let o = PropertyOracle::general("min-degree-7", 12, |g| (1..=g.n()).all(|v| g.degree(v) >= 7));
        let w = quadratic_bound_witness(&o, 12).unwrap();
        assert_eq!(w.case, QuadraticCase::Case2_2);
        assert!(w.nontrivial());
    }
}
