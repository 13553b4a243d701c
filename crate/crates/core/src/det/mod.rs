//! Deterministic decision-tree complexity.

mod adversary;
mod certificate;
mod crossing;
mod tournament;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::boolfn::{PartialAssignment, TruthTable};
use crate::error::{Error, Result};

pub use adversary::{
    duel, Adversary, ConnectivityAdversary, DuelOutcome, QueryStrategy, RowAdversary,
    TreeFormulaAdversary, TreeWalker,
};
pub use certificate::{
    certificate_complexity, certificate_pair, min_certificate_masks, normal_forms, Certificate,
    CertificateComplexity, Literal, NormalForms,
};
pub use crossing::crossing_strategy;
pub use tournament::{tournament_algorithm, Bracket, TournamentOutcome};

/// Largest variable count for the exponential exact searches.
pub const MAX_EXACT_VARS: usize = 14;

/// A query tree; `zero`/`one` are the subtrees for the answers 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DecisionTree {
    Leaf {
        value: bool,
    },
    Query {
        var: usize,
        zero: Box<DecisionTree>,
        one: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn leaf(value: bool) -> Self {
        DecisionTree::Leaf { value }
    }

    pub fn query(var: usize, zero: DecisionTree, one: DecisionTree) -> Self {
        DecisionTree::Query {
            var,
            zero: Box::new(zero),
            one: Box::new(one),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 0,
            DecisionTree::Query { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 1,
            DecisionTree::Query { zero, one, .. } => 1 + zero.size() + one.size(),
        }
    }

    /// Evaluates on the input with table index `a`.
    pub fn eval(&self, a: usize) -> bool {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf { value } => return *value,
                DecisionTree::Query { var, zero, one } => {
                    node = if a >> (var - 1) & 1 == 1 { one } else { zero };
                }
            }
        }
    }

    /// Variables read on input `a`, in query order.
    pub fn path(&self, a: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut node = self;
        while let DecisionTree::Query { var, zero, one } = node {
            out.push(*var);
            node = if a >> (var - 1) & 1 == 1 { one } else { zero };
        }
        out
    }

    /// True iff no variable repeats on any root-to-leaf path.
    pub fn is_simple(&self) -> bool {
        fn walk(t: &DecisionTree, seen: &mut Vec<usize>) -> bool {
            match t {
                DecisionTree::Leaf { .. } => true,
                DecisionTree::Query { var, zero, one } => {
                    if seen.contains(var) {
                        return false;
                    }
                    seen.push(*var);
                    let ok = walk(zero, seen) && walk(one, seen);
                    seen.pop();
                    ok
                }
            }
        }
        walk(self, &mut Vec::new())
    }

    /// True iff the tree is simple and agrees with `f` on all `2^n` inputs.
    pub fn computes(&self, f: &TruthTable) -> bool {
        self.is_simple() && (0..f.len()).all(|a| self.eval(a) == f.get(a))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DepthResult {
    pub depth: usize,
    pub witness: DecisionTree,
}

type MemoKey = (Vec<u8>, Vec<u64>);

/// Exact `D(f)` by memoized search over subfunctions.
///
/// Each subfunction is first projected onto its support; the memo key is the
/// (original support indices, projected table) pair.
pub struct DepthSolver {
    memo: HashMap<MemoKey, (usize, usize)>,
}

impl Default for DepthSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl DepthSolver {
    pub fn new() -> Self {
        DepthSolver {
            memo: HashMap::new(),
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn project(f: &TruthTable, vars: &[usize]) -> (TruthTable, Vec<usize>) {
        let support = f.support();
        if support.len() == f.n() {
            return (f.clone(), vars.to_vec());
        }
        let dummies = PartialAssignment::new(
            (1..=f.n())
                .filter(|i| !support.contains(i))
                .map(|i| (i, false)),
        )
        .expect("distinct indices");
        let g = f.restrict(&dummies).expect("indices in range");
        let kept = support.iter().map(|&i| vars[i - 1]).collect();
        (g, kept)
    }

    /// `D` of `f`, whose local variable `i` is original variable `vars[i-1]`.
    fn solve(&mut self, f: &TruthTable, vars: &[usize]) -> usize {
        let (g, kept) = Self::project(f, vars);
        if g.is_constant() {
            return 0;
        }
        let key = (
            kept.iter().map(|&v| v as u8).collect::<Vec<u8>>(),
            g.words().to_vec(),
        );
        if let Some(&(d, _)) = self.memo.get(&key) {
            return d;
        }
        let m = g.n();
        let mut best = usize::MAX;
        let mut best_var = kept[0];
        for i in 1..=m {
            let g0 = g.restrict_var(i, false).expect("in range");
            let g1 = g.restrict_var(i, true).expect("in range");
            let rest: Vec<usize> = kept
                .iter()
                .enumerate()
                .filter(|(k, _)| k + 1 != i)
                .map(|(_, &v)| v)
                .collect();
            let d0 = self.solve(&g0, &rest);
            if d0 + 1 >= best {
                continue;
            }
            let d1 = self.solve(&g1, &rest);
            let d = 1 + d0.max(d1);
            if d < best {
                best = d;
                best_var = kept[i - 1];
                // every variable is relevant, so 1 is a lower bound
                if best == 1 {
                    break;
                }
            }
        }
        self.memo.insert(key, (best, best_var));
        best
    }

    fn witness(&mut self, f: &TruthTable, vars: &[usize]) -> DecisionTree {
        let (g, kept) = Self::project(f, vars);
        if let Some(v) = g.constant_value() {
            return DecisionTree::leaf(v);
        }
        let key = (
            kept.iter().map(|&v| v as u8).collect::<Vec<u8>>(),
            g.words().to_vec(),
        );
        let var = match self.memo.get(&key) {
            Some(&(_, var)) => var,
            None => {
                self.solve(&g, &kept);
                self.memo[&key].1
            }
        };
        let local = kept.iter().position(|&v| v == var).expect("var in support") + 1;
        let rest: Vec<usize> = kept.iter().copied().filter(|&v| v != var).collect();
        let z = self.witness(&g.restrict_var(local, false).expect("in range"), &rest);
        let o = self.witness(&g.restrict_var(local, true).expect("in range"), &rest);
        DecisionTree::query(var, z, o)
    }

    pub fn depth(&mut self, f: &TruthTable) -> Result<usize> {
        check_exact_cap(f)?;
        let vars: Vec<usize> = (1..=f.n()).collect();
        Ok(self.solve(f, &vars))
    }

    pub fn depth_with_witness(&mut self, f: &TruthTable) -> Result<DepthResult> {
        let depth = self.depth(f)?;
        let vars: Vec<usize> = (1..=f.n()).collect();
        let witness = self.witness(f, &vars);
        Ok(DepthResult { depth, witness })
    }
}

pub(crate) fn check_exact_cap(f: &TruthTable) -> Result<()> {
    if f.n() > MAX_EXACT_VARS {
        Err(Error::VariableCount {
            n: f.n(),
            max: MAX_EXACT_VARS,
        })
    } else {
        Ok(())
    }
}

/// `D(f)` together with a witness tree of that depth.
pub fn decision_depth(f: &TruthTable) -> Result<DepthResult> {
    DepthSolver::new().depth_with_witness(f)
}
