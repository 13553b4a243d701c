//! Adversary arguments played against query strategies.

use serde::Serialize;

use crate::boolfn::{PartialAssignment, TruthTable};
use crate::error::{Error, Result};
use crate::formula::Formula;

use super::DecisionTree;

/// Answers queries so as to keep the function undetermined for as long as
/// possible. `known[i-1]` holds the answers given so far.
pub trait Adversary {
    fn function(&self) -> &TruthTable;
    fn answer(&mut self, var: usize, known: &[Option<bool>]) -> bool;
}

/// A deterministic querier; `None` means it has stopped.
pub trait QueryStrategy {
    fn next_query(&mut self, known: &[Option<bool>]) -> Option<usize>;
}

impl<F: FnMut(&[Option<bool>]) -> Option<usize>> QueryStrategy for F {
    fn next_query(&mut self, known: &[Option<bool>]) -> Option<usize> {
        self(known)
    }
}

/// Follows a decision tree, descending along the answers already known.
pub struct TreeWalker<'a> {
    node: &'a DecisionTree,
}

impl<'a> TreeWalker<'a> {
    pub fn new(tree: &'a DecisionTree) -> Self {
        TreeWalker { node: tree }
    }
}

impl QueryStrategy for TreeWalker<'_> {
    fn next_query(&mut self, known: &[Option<bool>]) -> Option<usize> {
        loop {
            match self.node {
                DecisionTree::Leaf { .. } => return None,
                DecisionTree::Query { var, zero, one } => match known.get(var - 1).copied().flatten() {
                    Some(false) => self.node = zero,
                    Some(true) => self.node = one,
                    None => return Some(*var),
                },
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DuelOutcome {
    pub queries: usize,
    pub transcript: Vec<(usize, bool)>,
    pub value: bool,
}

fn determined(f: &TruthTable, known: &[Option<bool>]) -> Option<bool> {
    let pa = PartialAssignment::new(
        known
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| (i + 1, b))),
    )
    .expect("distinct indices");
    f.restrict(&pa).expect("in range").constant_value()
}

/// Runs the strategy against the adversary until `f` is determined.
pub fn duel(adversary: &mut dyn Adversary, strategy: &mut dyn QueryStrategy) -> Result<DuelOutcome> {
    let f = adversary.function().clone();
    let n = f.n();
    let mut known: Vec<Option<bool>> = vec![None; n];
    let mut transcript = Vec::new();
    loop {
        if let Some(value) = determined(&f, &known) {
            return Ok(DuelOutcome {
                queries: transcript.len(),
                transcript,
                value,
            });
        }
        let var = strategy
            .next_query(&known)
            .ok_or(Error::PrematureStop(transcript.len()))?;
        if var == 0 || var > n {
            return Err(Error::VariableIndex { index: var, n });
        }
        if known[var - 1].is_some() {
            return Err(Error::RepeatedQuery(var));
        }
        let b = adversary.answer(var, &known);
        known[var - 1] = Some(b);
        transcript.push((var, b));
    }
}

/// `∧_i ∨_j x_{ij}` on an `m×m` matrix, row-major. Answers 0 until the
/// queried entry is the last unknown entry of its row.
pub struct RowAdversary {
    m: usize,
    f: TruthTable,
}

impl RowAdversary {
    pub fn new(m: usize) -> Result<Self> {
        let f = TruthTable::from_fn(m * m, |a| {
            (0..m).all(|i| (a >> (i * m)) & ((1 << m) - 1) != 0)
        })?;
        Ok(RowAdversary { m, f })
    }
}

impl Adversary for RowAdversary {
    fn function(&self) -> &TruthTable {
        &self.f
    }

    fn answer(&mut self, var: usize, known: &[Option<bool>]) -> bool {
        let row = (var - 1) / self.m;
        (0..self.m)
            .map(|j| row * self.m + j)
            .filter(|&k| k != var - 1)
            .all(|k| known[k].is_some())
    }
}

/// Pairs `(i, j)`, `i < j`, of `0..v` in lexicographic order.
pub(crate) fn edge_pairs(v: usize) -> Vec<(usize, usize)> {
    (0..v)
        .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
        .collect()
}

pub(crate) fn connected(v: usize, edges: &[(usize, usize)], present: impl Fn(usize) -> bool) -> bool {
    if v <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = v;
    for (e, &(a, b)) in edges.iter().enumerate() {
        if present(e) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                comps -= 1;
            }
        }
    }
    comps == 1
}

/// Graph connectivity on `v` vertices. Says "absent" unless deleting the
/// edge would disconnect the graph of all edges not yet ruled out.
pub struct ConnectivityAdversary {
    v: usize,
    edges: Vec<(usize, usize)>,
    f: TruthTable,
}

impl ConnectivityAdversary {
    pub fn new(v: usize) -> Result<Self> {
        let edges = edge_pairs(v);
        let f = TruthTable::from_fn(edges.len(), |a| connected(v, &edges, |e| a >> e & 1 == 1))?;
        Ok(ConnectivityAdversary { v, edges, f })
    }
}

impl Adversary for ConnectivityAdversary {
    fn function(&self) -> &TruthTable {
        &self.f
    }

    fn answer(&mut self, var: usize, known: &[Option<bool>]) -> bool {
        let e = var - 1;
        !connected(self.v, &self.edges, |k| k != e && known[k] != Some(false))
    }
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Lit { var: usize, positive: bool },
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

fn to_nnf(f: &Formula, negate: bool) -> Result<Node> {
    Ok(match f {
        Formula::Var { index } => Node::Lit {
            var: *index,
            positive: !negate,
        },
        Formula::Not { child } => to_nnf(child, !negate)?,
        Formula::And { left, right } => {
            let (l, r) = (to_nnf(left, negate)?, to_nnf(right, negate)?);
            if negate {
                Node::Or(Box::new(l), Box::new(r))
            } else {
                Node::And(Box::new(l), Box::new(r))
            }
        }
        Formula::Or { left, right } => {
            let (l, r) = (to_nnf(left, negate)?, to_nnf(right, negate)?);
            if negate {
                Node::And(Box::new(l), Box::new(r))
            } else {
                Node::Or(Box::new(l), Box::new(r))
            }
        }
        Formula::Nand { .. } => return Err(Error::UnsupportedGate("nand")),
    })
}

/// Value the adversary gives `var`: the literal is made neutral for its
/// parent gate (true under ∧, false under ∨), so no sibling is eliminated.
fn choose(node: &Node, var: usize, parent_and: Option<bool>) -> Option<bool> {
    match node {
        Node::Const(_) => None,
        Node::Lit { var: v, positive } => (*v == var).then_some(match parent_and {
            Some(true) | None => *positive,
            Some(false) => !*positive,
        }),
        Node::And(l, r) => choose(l, var, Some(true)).or_else(|| choose(r, var, Some(true))),
        Node::Or(l, r) => choose(l, var, Some(false)).or_else(|| choose(r, var, Some(false))),
    }
}

fn substitute(node: Node, var: usize, value: bool) -> Node {
    match node {
        Node::Lit { var: v, positive } if v == var => Node::Const(value == positive),
        Node::And(l, r) => match (substitute(*l, var, value), substitute(*r, var, value)) {
            (Node::Const(false), _) | (_, Node::Const(false)) => Node::Const(false),
            (Node::Const(true), x) | (x, Node::Const(true)) => x,
            (a, b) => Node::And(Box::new(a), Box::new(b)),
        },
        Node::Or(l, r) => match (substitute(*l, var, value), substitute(*r, var, value)) {
            (Node::Const(true), _) | (_, Node::Const(true)) => Node::Const(true),
            (Node::Const(false), x) | (x, Node::Const(false)) => x,
            (a, b) => Node::Or(Box::new(a), Box::new(b)),
        },
        other => other,
    }
}

/// Read-once ∧/∨/¬ formula: every variable must be read.
pub struct TreeFormulaAdversary {
    f: TruthTable,
    current: Node,
}

impl TreeFormulaAdversary {
    pub fn new(formula: &Formula) -> Result<Self> {
        if !formula.is_read_once() {
            return Err(Error::NotReadOnce);
        }
        Ok(TreeFormulaAdversary {
            f: formula.to_truth_table()?,
            current: to_nnf(formula, false)?,
        })
    }
}

impl Adversary for TreeFormulaAdversary {
    fn function(&self) -> &TruthTable {
        &self.f
    }

    fn answer(&mut self, var: usize, _known: &[Option<bool>]) -> bool {
        let value = choose(&self.current, var, None).unwrap_or(false);
        let node = std::mem::replace(&mut self.current, Node::Const(false));
        self.current = substitute(node, var, value);
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::{crossing_strategy, decision_depth};
    use crate::formula::{alternating_tree, parse};

    fn in_order(n: usize) -> impl FnMut(&[Option<bool>]) -> Option<usize> {
        move |known: &[Option<bool>]| (1..=n).find(|&i| known[i - 1].is_none())
    }

    fn reverse(n: usize) -> impl FnMut(&[Option<bool>]) -> Option<usize> {
        move |known: &[Option<bool>]| (1..=n).rev().find(|&i| known[i - 1].is_none())
    }

    #[test]
    fn row_adversary_forces_all_queries() {
        for m in 2..=3 {
            let n = m * m;
            let mut adv = RowAdversary::new(m).unwrap();
            assert_eq!(duel(&mut adv, &mut in_order(n)).unwrap().queries, n);
            let mut adv = RowAdversary::new(m).unwrap();
            assert_eq!(duel(&mut adv, &mut reverse(n)).unwrap().queries, n);
            let f = RowAdversary::new(m).unwrap().f;
            let tree = decision_depth(&f).unwrap().witness;
            let mut adv = RowAdversary::new(m).unwrap();
            assert_eq!(duel(&mut adv, &mut TreeWalker::new(&tree)).unwrap().queries, n);
        }
    }

    #[test]
    fn connectivity_adversary_forces_all_queries() {
        for v in 2..=5 {
            let n = v * (v - 1) / 2;
            let mut adv = ConnectivityAdversary::new(v).unwrap();
            let out = duel(&mut adv, &mut in_order(n)).unwrap();
            assert_eq!(out.queries, n);
            let mut adv = ConnectivityAdversary::new(v).unwrap();
            assert_eq!(duel(&mut adv, &mut reverse(n)).unwrap().queries, n);
            let f = ConnectivityAdversary::new(v).unwrap().f;
            let tree = crossing_strategy(&f).unwrap();
            let mut adv = ConnectivityAdversary::new(v).unwrap();
            assert_eq!(duel(&mut adv, &mut TreeWalker::new(&tree)).unwrap().queries, n);
        }
    }

    #[test]
    fn tree_adversary_forces_all_queries() {
        for text in ["x1", "x1 & x2", "(x1 | !x2) & (x3 | (x4 & !x5))", "!(x1 & (x2 | x3))"] {
            let formula = parse(text).unwrap();
            let n = formula.max_var();
            let mut adv = TreeFormulaAdversary::new(&formula).unwrap();
            assert_eq!(duel(&mut adv, &mut in_order(n)).unwrap().queries, n, "{text}");
            let mut adv = TreeFormulaAdversary::new(&formula).unwrap();
            assert_eq!(duel(&mut adv, &mut reverse(n)).unwrap().queries, n, "{text}");
        }
        let t = alternating_tree(3).unwrap();
        let tree = decision_depth(&t.to_truth_table().unwrap()).unwrap().witness;
        let mut adv = TreeFormulaAdversary::new(&t).unwrap();
        assert_eq!(duel(&mut adv, &mut TreeWalker::new(&tree)).unwrap().queries, 8);
        assert!(matches!(
            TreeFormulaAdversary::new(&parse("x1 & x1").unwrap()),
            Err(Error::NotReadOnce)
        ));
    }

    #[test]
    fn strategy_errors() {
        let mut adv = RowAdversary::new(2).unwrap();
        let mut stubborn = |_: &[Option<bool>]| Some(1);
        assert_eq!(duel(&mut adv, &mut stubborn).unwrap_err(), Error::RepeatedQuery(1));
        let mut adv = RowAdversary::new(2).unwrap();
        let mut quitter = |_: &[Option<bool>]| None;
        assert_eq!(duel(&mut adv, &mut quitter).unwrap_err(), Error::PrematureStop(0));
    }
}
