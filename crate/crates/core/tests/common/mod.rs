//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use evlab_core::formula::Formula;
use evlab_core::TruthTable;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_table(n: usize, rng: &mut ChaCha8Rng) -> TruthTable {
    let bits: Vec<bool> = (0..1usize << n).map(|_| rng.random_bool(0.5)).collect();
    TruthTable::from_fn(n, |a| bits[a]).unwrap()
}

pub fn random_nonconstant(n: usize, rng: &mut ChaCha8Rng) -> TruthTable {
    loop {
        let f = random_table(n, rng);
        if !f.is_constant() {
            return f;
        }
    }
}

/// Decision depth by plain recursion over restrictions: no memo, no pruning.
pub fn brute_depth(bits: &[bool], n: usize) -> usize {
    if bits.iter().all(|&b| b == bits[0]) {
        return 0;
    }
    (0..n)
        .map(|i| {
            let half = |v: usize| -> Vec<bool> {
                (0..bits.len())
                    .filter(|a| a >> i & 1 == v)
                    .map(|a| bits[a])
                    .collect()
            };
            1 + brute_depth(&half(0), n - 1).max(brute_depth(&half(1), n - 1))
        })
        .min()
        .unwrap()
}

pub fn bits(f: &TruthTable) -> Vec<bool> {
    (0..f.len()).map(|a| f.get(a)).collect()
}

/// Smallest set of positions of `a` whose values force `f(a)`.
pub fn brute_certificate(f: &TruthTable, a: usize) -> usize {
    let n = f.n();
    let v = f.get(a);
    (0..1usize << n)
        .filter(|&s| (0..f.len()).all(|b| (b ^ a) & s != 0 || f.get(b) == v))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

/// `(D₀, D₁)` by brute force; `None` for an unattained value.
pub fn brute_d0_d1(f: &TruthTable) -> (Option<usize>, Option<usize>) {
    let mut out = (None, None);
    for a in 0..f.len() {
        let c = brute_certificate(f, a);
        let slot = if f.get(a) { &mut out.1 } else { &mut out.0 };
        *slot = Some(slot.map_or(c, |x: usize| x.max(c)));
    }
    out
}

pub fn eval_formula(f: &Formula, x: &[bool]) -> bool {
    match f {
        Formula::Var { index } => x[index - 1],
        Formula::Not { child } => !eval_formula(child, x),
        Formula::And { left, right } => eval_formula(left, x) && eval_formula(right, x),
        Formula::Or { left, right } => eval_formula(left, x) || eval_formula(right, x),
        Formula::Nand { left, right } => !(eval_formula(left, x) && eval_formula(right, x)),
    }
}

/// Arbitrary formulas over `x1..x6` of bounded depth.
pub fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = (1usize..=6).prop_map(Formula::var);
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::nand(a, b)),
        ]
    })
}

/// Read-once and/or formulas over exactly `x1..x_leaves`, random shape.
pub fn read_once(leaves: usize, rng: &mut ChaCha8Rng) -> Formula {
    fn build(lo: usize, hi: usize, rng: &mut ChaCha8Rng) -> Formula {
        if hi - lo == 1 {
            return Formula::var(lo);
        }
        let mid = rng.random_range(lo + 1..hi);
        let (l, r) = (build(lo, mid, rng), build(mid, hi, rng));
        if rng.random_bool(0.5) {
            Formula::and(l, r)
        } else {
            Formula::or(l, r)
        }
    }
    build(1, leaves + 1, rng)
}
