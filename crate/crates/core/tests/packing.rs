mod common;

use evlab_core::packing::{
    bipartite_condition, pack_by_random_matching, pack_by_swaps, pack_by_swaps_with, pack_exhaustive,
    pack_exhaustive_general, perfect_matching, swap_trials, BipartiteGraph, Graph, MatchingOutcome, PackingResult,
};
use evlab_core::ExecPolicy;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_bipartite(n: usize, p: f64, rng: &mut ChaCha8Rng) -> BipartiteGraph {
    let edges: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| (1..=n).map(move |w| (u, w)))
        .filter(|_| rng.random_bool(p))
        .collect();
    BipartiteGraph::new(n, edges).unwrap()
}

fn disjoint(g1: &BipartiteGraph, g2: &BipartiteGraph, u: &[usize], w: &[usize]) -> bool {
    let mut image = g1.edges().iter().map(|&(a, b)| (u[a - 1], w[b - 1]));
    image.all(|(a, b)| !g2.edges().contains(&(a, b)))
}

fn is_perm(p: &[usize]) -> bool {
    let mut s = p.to_vec();
    s.sort();
    s == (1..=p.len()).collect::<Vec<_>>()
}

/// Graphs with max degrees small enough for the bipartite condition.
fn sparse_pair(n: usize, rng: &mut ChaCha8Rng) -> (BipartiteGraph, BipartiteGraph) {
    loop {
        let p = rng.random_range(0.02..0.12);
        let (a, b) = (random_bipartite(n, p, rng), random_bipartite(n, p, rng));
        if bipartite_condition(&a, &b).unwrap().holds {
            return (a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swap_packer_is_sound(n in 2usize..=5, p in 0.1f64..0.7, seed: u64) {
        let mut rng = common::rng(seed);
        let (g1, g2) = (random_bipartite(n, p, &mut rng), random_bipartite(n, p, &mut rng));
        let exhaustive = pack_exhaustive(&g1, &g2).unwrap();
        if let Some((u, w)) = &exhaustive {
            prop_assert!(is_perm(u) && is_perm(w) && disjoint(&g1, &g2, u, w));
        }
        match pack_by_swaps(&g1, &g2, seed).unwrap() {
            PackingResult::Packed { u_perm, w_perm, .. } => {
                prop_assert!(is_perm(&u_perm) && is_perm(&w_perm));
                prop_assert!(disjoint(&g1, &g2, &u_perm, &w_perm));
                prop_assert!(exhaustive.is_some());
            }
            PackingResult::LocalMin { u_perm, w_perm, overlaps, .. } => {
                let count = g1.relabel(&u_perm, &w_perm).unwrap().edges().iter()
                    .filter(|e| g2.edges().contains(e)).count();
                prop_assert_eq!(count, overlaps);
                prop_assert!(overlaps > 0);
            }
            PackingResult::Exhausted { .. } => prop_assert!(false, "swaps never exhaust"),
        }
    }

    #[test]
    fn hall_violators_are_genuine(n in 1usize..=8, p in 0.05f64..0.6, seed: u64) {
        let h = random_bipartite(n, p, &mut common::rng(seed));
        match perfect_matching(&h) {
            MatchingOutcome::Perfect { mate } => {
                prop_assert!(is_perm(&mate));
                for (i, &w) in mate.iter().enumerate() {
                    prop_assert!(h.has_edge(i + 1, w));
                }
            }
            MatchingOutcome::HallViolator { x, neighborhood } => {
                let mut n_x: Vec<usize> = (1..=n)
                    .filter(|&w| x.iter().any(|&u| h.has_edge(u, w)))
                    .collect();
                n_x.sort();
                n_x.dedup();
                prop_assert_eq!(&n_x, &neighborhood);
                prop_assert!(neighborhood.len() < x.len());
            }
        }
    }
}

#[test]
fn condition_satisfying_pairs_always_pack() {
    let mut rng = common::rng(77);
    for i in 0..200 {
        let n = 8 + i % 8;
        let (g1, g2) = sparse_pair(n, &mut rng);
        assert!(pack_by_swaps_with(&g1, &g2, i as u64, 0).unwrap().is_packed(), "pair {i}");
        match pack_by_random_matching(&g1, &g2, i as u64, 20).unwrap() {
            PackingResult::Packed { u_perm, w_perm, .. } => assert!(disjoint(&g1, &g2, &u_perm, &w_perm)),
            other => panic!("pair {i}: {other:?}"),
        }
    }
}

#[test]
fn swap_trials_are_policy_independent() {
    let mut rng = common::rng(3);
    let pairs: Vec<_> = (0..24).map(|_| (random_bipartite(7, 0.3, &mut rng), random_bipartite(7, 0.3, &mut rng))).collect();
    let a = swap_trials(&pairs, 11, ExecPolicy::Sequential);
    let b = swap_trials(&pairs, 11, ExecPolicy::Parallel);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn general_exhaustive_agrees_with_relabel() {
    let mut rng = common::rng(12);
    for _ in 0..100 {
        let v = rng.random_range(3..=6);
        let pick = |rng: &mut ChaCha8Rng, p: f64| {
            let edges: Vec<_> = (1..=v)
                .flat_map(|a| (a + 1..=v).map(move |b| (a, b)))
                .filter(|_| rng.random_bool(p))
                .collect();
            Graph::new(v, edges).unwrap()
        };
        let (g1, g2) = (pick(&mut rng, 0.4), pick(&mut rng, 0.4));
        if let Some(perm) = pack_exhaustive_general(&g1, &g2).unwrap() {
            let img = g1.relabel(&perm).unwrap();
            assert!(img.edges().iter().all(|&(a, b)| !g2.has_edge(a, b)));
        }
    }
    // Too many edges to fit together.
    let k4 = Graph::complete(4).unwrap();
    let single = Graph::new(4, [(1, 2)]).unwrap();
    assert_eq!(pack_exhaustive_general(&k4, &single).unwrap(), None);
}
