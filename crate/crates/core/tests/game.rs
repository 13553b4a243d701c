mod common;

use evlab_core::det::decision_depth;
use evlab_core::game::{
    best_response_tree, expected_cost, randomized_complexity, randomized_complexity_unit, tree_cost, CostVector,
    InputDistribution,
};
use evlab_core::rational::{frac, q};
use evlab_core::{TruthTable, Q};
use num_traits::Zero;
use rand::Rng;

/// Cheapest expected cost of an always-correct tree, by naive recursion over
/// subcubes given as (fixed mask, fixed values).
fn brute_best(f: &TruthTable, p: &[Q], c: &CostVector, mask: usize, vals: usize) -> Q {
    let inside = |a: usize| a & mask == vals;
    let mut seen = (false, false);
    for a in (0..f.len()).filter(|&a| inside(a)) {
        if f.get(a) { seen.1 = true } else { seen.0 = true }
    }
    if !(seen.0 && seen.1) {
        return Q::zero();
    }
    (0..f.n())
        .filter(|i| mask >> i & 1 == 0)
        .map(|i| {
            [false, true]
                .into_iter()
                .map(|b| {
                    let v = if b { vals | 1 << i } else { vals };
                    let mass = (0..f.len())
                        .filter(|&a| a & (mask | 1 << i) == v)
                        .fold(Q::zero(), |acc, a| acc + &p[a]);
                    mass * c.cost(i + 1, b) + brute_best(f, p, c, mask | 1 << i, v)
                })
                .fold(Q::zero(), |a, b| a + b)
        })
        .min()
        .unwrap()
}

fn random_distribution(n: usize, rng: &mut impl Rng) -> InputDistribution {
    let w: Vec<i64> = (0..1 << n).map(|_| rng.random_range(0..5)).collect();
    let total: i64 = w.iter().sum::<i64>().max(1);
    if w.iter().all(|&x| x == 0) {
        return InputDistribution::uniform(n);
    }
    InputDistribution::new(w.iter().map(|&x| frac(x, total)).collect()).unwrap()
}

#[test]
fn best_response_matches_brute_force() {
    let mut rng = common::rng(5);
    for i in 0..150 {
        let n = 1 + i % 3;
        let f = common::random_table(n, &mut rng);
        let dist = random_distribution(n, &mut rng);
        let c = CostVector::new(
            (0..n).map(|_| q(rng.random_range(1..4))).collect(),
            (0..n).map(|_| q(rng.random_range(1..4))).collect(),
        )
        .unwrap();
        let br = best_response_tree(&f, &dist, &c).unwrap();
        assert!(br.tree.computes(&f));
        assert_eq!(expected_cost(&br.tree, &dist, &c), br.cost);
        assert_eq!(br.cost, brute_best(&f, &dist.probs, &c, 0, 0), "case {i}");
    }
}

#[test]
fn randomized_complexity_sandwich() {
    let mut rng = common::rng(50);
    for i in 0..50 {
        let n = 1 + i % 3;
        let f = common::random_nonconstant(n, &mut rng);
        let s = randomized_complexity_unit(&f).unwrap();
        let d = decision_depth(&f).unwrap().depth;
        assert!(s.exact);
        assert_eq!(s.value, s.lower_bound);
        assert!(s.value <= q(d as i64));
        assert!(s.value >= q(1));
        // History of restricted values never increases.
        assert!(s.value_history.windows(2).all(|w| w[1] <= w[0]));
        // The mixed strategy's worst input matches the value.
        let unit = CostVector::unit(n);
        let worst = (0..f.len())
            .map(|x| {
                s.algorithm_strategy
                    .iter()
                    .fold(Q::zero(), |acc, t| acc + &t.probability * tree_cost(&t.tree, x, &unit))
            })
            .max()
            .unwrap();
        assert_eq!(worst, s.value);
        // The adversary's distribution forces the value against every tree.
        let br = best_response_tree(&f, &s.adversary_distribution, &unit).unwrap();
        assert_eq!(br.cost, s.lower_bound);
    }
}

#[test]
fn known_values() {
    // OR of two bits: input 00 forces both reads.
    let or2 = TruthTable::or_all(2).unwrap();
    assert_eq!(randomized_complexity_unit(&or2).unwrap().value, q(2));
    // Depth-2 alternating tree on four leaves.
    let t = evlab_core::formula::alternating_tree(2).unwrap().to_truth_table().unwrap();
    assert_eq!(randomized_complexity_unit(&t).unwrap().value, q(3));
    // Parity is deterministic-hard for every algorithm.
    let par = TruthTable::parity(3).unwrap();
    assert_eq!(randomized_complexity_unit(&par).unwrap().value, q(3));
    // A positive tolerance can stop early but the bracket stays valid.
    let f = TruthTable::from_hex(4, "6996").unwrap();
    let s = randomized_complexity(&f, &CostVector::unit(4), &frac(1, 10), 200).unwrap();
    assert!(s.lower_bound <= s.value);
}
