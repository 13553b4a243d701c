//! Randomized decision-tree complexity `D_R(f, c)` as a zero-sum game
//! between tree mixtures and input distributions.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::boolfn::{Subcubes, TruthTable, HAS_ONE, HAS_ZERO};
use crate::criteria::{rotation_invariant_function, rotation_orbits};
use crate::det::{certificate_pair, DecisionTree};
use crate::error::{Error, Result};
use crate::lp::{solve_matrix_game, MatrixGameSolution};
use crate::par::ExecPolicy;
use crate::rational::{format_q, frac, one, zero, Q};

/// Largest `n` for the `3^n` best-response table.
pub const MAX_BEST_RESPONSE_VARS: usize = 12;
/// Largest `n` for column generation (all `2^n` inputs are rows).
pub const MAX_GAME_VARS: usize = 10;

/// Per-variable costs of learning `x_i = 0` and `x_i = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostVector {
    #[serde(with = "crate::rational::serde_q_vec")]
    pub c0: Vec<Q>,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub c1: Vec<Q>,
}

impl CostVector {
    pub fn new(c0: Vec<Q>, c1: Vec<Q>) -> Result<Self> {
        if c0.len() != c1.len() {
            return Err(Error::SizeMismatch {
                expected: c0.len(),
                got: c1.len(),
            });
        }
        if c0.iter().chain(&c1).any(Signed::is_negative) {
            return Err(Error::Format("costs must be nonnegative".into()));
        }
        Ok(CostVector { c0, c1 })
    }

    pub fn unit(n: usize) -> Self {
        CostVector {
            c0: vec![one(); n],
            c1: vec![one(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.c0.len()
    }

    pub fn cost(&self, var: usize, value: bool) -> &Q {
        if value {
            &self.c1[var - 1]
        } else {
            &self.c0[var - 1]
        }
    }
}

/// A probability for every input index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDistribution {
    #[serde(with = "crate::rational::serde_q_vec")]
    pub probs: Vec<Q>,
}

impl InputDistribution {
    pub fn new(probs: Vec<Q>) -> Result<Self> {
        if probs.iter().any(Signed::is_negative) {
            return Err(Error::NotNormalized("negative probability".into()));
        }
        let total = probs.iter().fold(zero(), |a, b| a + b);
        if total != one() {
            return Err(Error::NotNormalized(format!("sums to {}", format_q(&total))));
        }
        Ok(InputDistribution { probs })
    }

    pub fn uniform(n: usize) -> Self {
        let len = 1usize << n;
        InputDistribution {
            probs: vec![Q::new(1.into(), len.into()); len],
        }
    }

    pub fn point(n: usize, a: usize) -> Self {
        let mut probs = vec![zero(); 1 << n];
        probs[a] = one();
        InputDistribution { probs }
    }
}

/// `δ(T, x, c)`: the cost of the queries `T` makes on input `x`.
pub fn tree_cost(tree: &DecisionTree, x: usize, c: &CostVector) -> Q {
    tree.path(x)
        .into_iter()
        .fold(zero(), |acc, v| acc + c.cost(v, x >> (v - 1) & 1 == 1))
}

pub fn expected_cost(tree: &DecisionTree, q: &InputDistribution, c: &CostVector) -> Q {
    q.probs
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .fold(zero(), |acc, (x, p)| acc + p * tree_cost(tree, x, c))
}

#[derive(Debug, Clone, Serialize)]
pub struct BestResponse {
    pub tree: DecisionTree,
    #[serde(with = "crate::rational::serde_q")]
    pub cost: Q,
}

/// Cheapest always-correct tree against `q`, by dynamic programming over the
/// `3^n` subcubes. Ties in expected cost are broken by the cost under unit
/// costs and the uniform distribution, then by the lowest variable.
pub fn best_response_tree(f: &TruthTable, q: &InputDistribution, c: &CostVector) -> Result<BestResponse> {
    let n = f.n();
    if n > MAX_BEST_RESPONSE_VARS {
        return Err(Error::VariableCount {
            n,
            max: MAX_BEST_RESPONSE_VARS,
        });
    }
    if q.probs.len() != f.len() || c.n() != n {
        return Err(Error::SizeMismatch {
            expected: f.len(),
            got: q.probs.len(),
        });
    }
    let _ = InputDistribution::new(q.probs.clone())?;
    let sub = Subcubes::new(f);
    let total = sub.count();
    // unnormalized: mass of each subcube; the second component counts inputs
    let mut mass: Vec<Q> = Vec::with_capacity(total);
    let mut value: Vec<(Q, u64)> = Vec::with_capacity(total);
    let mut choice: Vec<u8> = vec![0; total];
    for cube in 0..total {
        let mut rest = cube;
        let mut a = 0usize;
        let mut free = Vec::new();
        for i in 0..n {
            let d = rest % 3;
            rest /= 3;
            if d == 2 {
                free.push(i);
            } else {
                a |= d << i;
            }
        }
        match free.first() {
            None => mass.push(q.probs[a].clone()),
            Some(&i) => {
                let c0 = cube - 2 * sub.pow3(i);
                let m = &mass[c0] + &mass[c0 + sub.pow3(i)];
                mass.push(m);
            }
        }
        let fl = sub.flags(cube);
        if fl != HAS_ZERO | HAS_ONE {
            value.push((zero(), 0));
            continue;
        }
        let count_half = 1u64 << (free.len() - 1);
        let mut best: Option<(Q, u64)> = None;
        for &i in &free {
            let z = cube - 2 * sub.pow3(i);
            let o = z + sub.pow3(i);
            let v = &mass[z] * &c.c0[i] + &value[z].0 + &mass[o] * &c.c1[i] + &value[o].0;
            let w = 2 * count_half + value[z].1 + value[o].1;
            let better = match &best {
                None => true,
                Some((bv, bw)) => v < *bv || (v == *bv && w < *bw),
            };
            if better {
                best = Some((v, w));
                choice[cube] = i as u8;
            }
        }
        value.push(best.expect("a free variable exists"));
    }
    fn build(cube: usize, sub: &Subcubes, choice: &[u8]) -> DecisionTree {
        match sub.flags(cube) {
            HAS_ZERO => DecisionTree::leaf(false),
            HAS_ONE => DecisionTree::leaf(true),
            _ => {
                let i = choice[cube] as usize;
                let z = cube - 2 * sub.pow3(i);
                DecisionTree::query(i + 1, build(z, sub, choice), build(z + sub.pow3(i), sub, choice))
            }
        }
    }
    let root = total - 1;
    Ok(BestResponse {
        tree: build(root, &sub, &choice),
        cost: value[root].0.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedTree {
    #[serde(with = "crate::rational::serde_q")]
    pub probability: Q,
    pub tree: DecisionTree,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameSolution {
    /// Guaranteed worst-case expected cost of `algorithm_strategy`.
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
    /// Best-response cost against `adversary_distribution`.
    #[serde(with = "crate::rational::serde_q")]
    pub lower_bound: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub gap: Q,
    pub exact: bool,
    pub iterations: usize,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub value_history: Vec<Q>,
    pub algorithm_strategy: Vec<WeightedTree>,
    pub adversary_distribution: InputDistribution,
}

/// Column generation: rows are all inputs, columns a growing working set of
/// trees; each round adds the best response to the restricted optimal
/// input distribution.
pub fn randomized_complexity(
    f: &TruthTable,
    c: &CostVector,
    tolerance: &Q,
    max_iterations: usize,
) -> Result<GameSolution> {
    let n = f.n();
    if n > MAX_GAME_VARS {
        return Err(Error::VariableCount {
            n,
            max: MAX_GAME_VARS,
        });
    }
    if c.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: c.n(),
        });
    }
    let inputs = f.len();
    let mut trees = vec![best_response_tree(f, &InputDistribution::uniform(n), c)?.tree];
    let mut columns: Vec<Vec<Q>> = vec![(0..inputs).map(|x| tree_cost(&trees[0], x, c)).collect()];
    let mut history = Vec::new();
    let mut last_gap = None;
    for iteration in 1..=max_iterations {
        let matrix: Vec<Vec<Q>> = (0..inputs)
            .map(|x| columns.iter().map(|col| col[x].clone()).collect())
            .collect();
        let MatrixGameSolution {
            value,
            row_mix,
            col_mix,
            gap: game_gap,
            exact,
        } = solve_matrix_game(&matrix, tolerance)?;
        let adversary = InputDistribution { probs: row_mix };
        let br = best_response_tree(f, &adversary, c)?;
        let upper = if exact { value } else { &value + &game_gap };
        history.push(upper.clone());
        let gap = &upper - &br.cost;
        if gap <= *tolerance {
            let algorithm_strategy = trees
                .into_iter()
                .zip(col_mix)
                .filter(|(_, p)| !p.is_zero())
                .map(|(tree, probability)| WeightedTree { probability, tree })
                .collect();
            return Ok(GameSolution {
                value: upper,
                lower_bound: br.cost,
                gap,
                exact,
                iterations: iteration,
                value_history: history,
                algorithm_strategy,
                adversary_distribution: adversary,
            });
        }
        last_gap = Some(gap);
        if trees.contains(&br.tree) {
            break;
        }
        columns.push((0..inputs).map(|x| tree_cost(&br.tree, x, c)).collect());
        trees.push(br.tree);
    }
    Err(Error::NoConvergence {
        iterations: history.len(),
        gap: last_gap.map(|g| format_q(&g)).unwrap_or_default(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionBound {
    /// `f = 0` whenever every block has at least `t` zeros.
    pub zero_clause: bool,
    /// `f = 1` whenever some block is all ones.
    pub one_clause: bool,
    pub hypothesis_ok: bool,
    /// `n / t`, without the unspecified constant.
    #[serde(with = "crate::rational::serde_q")]
    pub raw_bound: Q,
    pub constant_free: bool,
}

pub fn partition_bound(f: &TruthTable, partition: &[Vec<usize>], t: usize) -> Result<PartitionBound> {
    let n = f.n();
    if n > 14 {
        return Err(Error::VariableCount { n, max: 14 });
    }
    if t == 0 {
        return Err(Error::MalformedPartition("t must be at least 1".into()));
    }
    let mut seen = vec![false; n];
    let mut masks = Vec::with_capacity(partition.len());
    for block in partition {
        if block.len() < t {
            return Err(Error::MalformedPartition(format!("block {block:?} smaller than t = {t}")));
        }
        let mut m = 0usize;
        for &v in block {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::MalformedPartition(format!("bad or repeated variable {v}")));
            }
            seen[v - 1] = true;
            m |= 1 << (v - 1);
        }
        masks.push(m);
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::MalformedPartition("blocks do not cover every variable".into()));
    }
    let zero_clause = (0..f.len())
        .filter(|&a| masks.iter().all(|&m| (m & !a).count_ones() as usize >= t))
        .all(|a| !f.get(a));
    let one_clause = (0..f.len())
        .filter(|&a| masks.iter().any(|&m| m & !a == 0))
        .all(|a| f.get(a));
    Ok(PartitionBound {
        zero_clause,
        one_clause,
        hypothesis_ok: zero_clause && one_clause,
        raw_bound: frac(n as i64, t as i64),
        constant_free: true,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateProductCheck {
    pub n: usize,
    pub exhaustive: bool,
    pub functions_checked: usize,
    pub min_product: usize,
    pub violations: Vec<String>,
}

/// `D₀(f)·D₁(f) ≥ n` over nonconstant rotation-invariant `f`: every one when
/// `sample` is `None`, else `sample.0` seeded draws of orbit patterns.
pub fn certificate_product_check(
    n: usize,
    sample: Option<(usize, u64)>,
    policy: ExecPolicy,
) -> Result<CertificateProductCheck> {
    let (_, orbits) = rotation_orbits(n)?;
    let full = (1u64 << orbits) - 1;
    let patterns: Vec<u64> = match sample {
        None => (1..full).collect(),
        Some((count, seed)) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| rng.random_range(1..full)).collect()
        }
    };
    let results = policy.map(&patterns, |&p| -> Result<(String, usize)> {
        let f = rotation_invariant_function(n, p)?;
        let (d0, d1) = certificate_pair(&f)?;
        Ok((f.to_hex(), d0.unwrap_or(0) * d1.unwrap_or(0)))
    });
    let mut violations = Vec::new();
    let mut min_product = usize::MAX;
    for r in results {
        let (hex, prod) = r?;
        min_product = min_product.min(prod);
        if prod < n {
            violations.push(hex);
        }
    }
    Ok(CertificateProductCheck {
        n,
        exhaustive: sample.is_none(),
        functions_checked: patterns.len(),
        min_product,
        violations,
    })
}

/// Unit-cost tolerance-free convenience: exact `D_R(f)` for small `f`.
pub fn randomized_complexity_unit(f: &TruthTable) -> Result<GameSolution> {
    randomized_complexity(f, &CostVector::unit(f.n()), &zero(), 200)
}
