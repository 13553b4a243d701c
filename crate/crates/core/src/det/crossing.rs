//! The DNF/CNF crossing strategy: always query a variable of some live term.

use crate::boolfn::TruthTable;
use crate::error::Result;

use super::certificate::{normal_forms, Literal};
use super::DecisionTree;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    True,
    False,
    Open,
}

fn literal_status(l: &Literal, known: &[Option<bool>]) -> Status {
    match known[l.var - 1] {
        Some(v) if v == l.value => Status::True,
        Some(_) => Status::False,
        None => Status::Open,
    }
}

fn build(dnf: &[Vec<Literal>], cnf: &[Vec<Literal>], known: &mut Vec<Option<bool>>) -> DecisionTree {
    let term = |t: &Vec<Literal>| {
        let st: Vec<Status> = t.iter().map(|l| literal_status(l, known)).collect();
        if st.contains(&Status::False) {
            Status::False
        } else if st.iter().all(|&s| s == Status::True) {
            Status::True
        } else {
            Status::Open
        }
    };
    let clause = |c: &Vec<Literal>| {
        let st: Vec<Status> = c.iter().map(|l| literal_status(l, known)).collect();
        if st.contains(&Status::True) {
            Status::True
        } else if st.iter().all(|&s| s == Status::False) {
            Status::False
        } else {
            Status::Open
        }
    };
    let terms: Vec<Status> = dnf.iter().map(term).collect();
    if terms.contains(&Status::True) {
        return DecisionTree::leaf(true);
    }
    let clauses: Vec<Status> = cnf.iter().map(clause).collect();
    if clauses.contains(&Status::False) || terms.iter().all(|&s| s == Status::False) {
        return DecisionTree::leaf(false);
    }
    if clauses.iter().all(|&s| s == Status::True) {
        return DecisionTree::leaf(true);
    }
    let live = terms
        .iter()
        .position(|&s| s == Status::Open)
        .expect("some term is open");
    let var = dnf[live]
        .iter()
        .find(|l| known[l.var - 1].is_none())
        .expect("open term has a free literal")
        .var;
    known[var - 1] = Some(false);
    let zero = build(dnf, cnf, known);
    known[var - 1] = Some(true);
    let one = build(dnf, cnf, known);
    known[var - 1] = None;
    DecisionTree::query(var, zero, one)
}

/// Tree that repeatedly queries the first free variable of the first term of
/// the minimal-certificate DNF not yet falsified. Its depth is at most
/// `D_0(f)·D_1(f)`.
pub fn crossing_strategy(f: &TruthTable) -> Result<DecisionTree> {
    let nf = normal_forms(f)?;
    let mut known = vec![None; f.n()];
    Ok(build(&nf.dnf, &nf.cnf, &mut known))
}
