//! Acceptance run: one PASS/FAIL line per criterion with its tolerance and
//! runtime. `cargo test -p evlab-cli --test acceptance -- --nocapture`
//! shows the table; set `EVLAB_UPDATE_GOLDEN=1` to rewrite the golden files.
//!
//! A few sub-checks cannot be met by any correct implementation (see
//! `UNATTAINABLE`); they print FAIL and are reported, but do not abort the
//! run. Every other failing sub-check does.

#![allow(clippy::needless_range_loop)]

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use evlab_core::boolfn::enumerate_monotone;
use evlab_core::criteria::{
    chi_via_mu, complex_stats, isolated_vertex_parity, mobius_check, mu, rotation_invariant_functions,
    weight_polynomial, ComplexView,
};
use evlab_core::det::{certificate_pair, decision_depth, tournament_algorithm, Bracket};
use evlab_core::formula::{alternating_tree, parse};
use evlab_core::game::{randomized_complexity_unit, GameSolution};
use evlab_core::nand::{closed_form, eigen_analysis, recurrence_values, worst_case_expectation};
use evlab_core::packing::{
    bipartite_condition, pack_by_swaps, pack_exhaustive, pack_exhaustive_general, BipartiteGraph, Graph,
    PackingResult,
};
use evlab_core::props::{lower_bound_pipeline, property_by_name, property_to_function};
use evlab_core::rational::{frac, q, to_f64};
use evlab_core::sw::sw_lower_bound;
use evlab_core::{ExecPolicy, TruthTable, Q};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sub-checks whose targets sit outside what the exact values allow.
const UNATTAINABLE: &[&str] = &["exponent in [0.7535, 0.7537]", "growth ratio within 1e-3 of lambda+ at k = 12"];

struct Check {
    label: String,
    pass: bool,
    detail: String,
}

struct Criterion {
    id: u32,
    title: &'static str,
    tolerance: &'static str,
    limit: Duration,
    checks: Vec<Check>,
}

impl Criterion {
    fn new(id: u32, title: &'static str, tolerance: &'static str, limit_secs: u64) -> Self {
        Criterion {
            id,
            title,
            tolerance,
            limit: Duration::from_secs(limit_secs),
            checks: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            pass,
            detail: detail.into(),
        });
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- 1

fn monotone_audit(c: &mut Criterion) {
    for (n, expected) in [(3usize, 20usize), (4, 168)] {
        let mut count = 0;
        let mut exceptions = Vec::new();
        for f in enumerate_monotone(n).unwrap() {
            count += 1;
            let d = decision_depth(&f).unwrap().depth;
            let m = mu(&f);
            let mut ok = m == 0 || d == n;
            if d < n && f.constant_value() != Some(true) {
                let view = ComplexView::new(f.clone()).unwrap();
                ok &= complex_stats(&view).chi == -1 && chi_via_mu(&view) == -1;
            }
            ok &= weight_polynomial(&f, d).unwrap().divisible;
            ok &= mobius_check(&f, d).unwrap().strict;
            ok &= f.count_ones() % (1u64 << (n - d)) == 0;
            if !ok {
                exceptions.push(f.to_hex());
            }
        }
        c.check(format!("n = {n}: {expected} functions"), count == expected, format!("{count}"));
        c.check(format!("n = {n}: zero exceptions"), exceptions.is_empty(), format!("{exceptions:?}"));
    }
}

// ---------------------------------------------------------------- 2

fn cyclic_audit(c: &mut Criterion) {
    let n = 5;
    let all = rotation_invariant_functions(n).unwrap();
    c.check("256 rotation-invariant functions", all.len() == 256, format!("{}", all.len()));
    let top = (1 << n) - 1;
    let (mut product_bad, mut evasive_bad, mut separating) = (0, 0, 0);
    for f in &all {
        if f.is_constant() {
            continue;
        }
        if let (Some(a), Some(b)) = certificate_pair(f).unwrap() {
            if a * b < n {
                product_bad += 1;
            }
        }
        if f.get(0) != f.get(top) {
            separating += 1;
            if decision_depth(f).unwrap().depth != n {
                evasive_bad += 1;
            }
        }
    }
    c.check("nontrivial: D0*D1 >= 5", product_bad == 0, format!("{product_bad} exceptions"));
    c.check(
        "f(0) != f(1): D = 5",
        evasive_bad == 0 && separating > 0,
        format!("{separating} functions, {evasive_bad} exceptions"),
    );
}

// ---------------------------------------------------------------- 3

fn nand_exactness(c: &mut Criterion) {
    let rec = recurrence_values(30).unwrap();
    for (k, want) in [(1, q(2)), (2, q(3)), (3, frac(11, 2))] {
        let w = worst_case_expectation(k, ExecPolicy::Parallel).unwrap();
        c.check(
            format!("worst case k = {k}"),
            w.value == want && &w.value == rec[k].max(),
            format!("{} (recurrence {})", w.value, rec[k].max()),
        );
    }
    let w4 = worst_case_expectation(4, ExecPolicy::Parallel).unwrap();
    c.check(
        "worst case k = 4 <= prediction",
        &w4.value <= rec[4].max(),
        format!("{} vs {}", w4.value, rec[4].max()),
    );
    let mut err = 0.0f64;
    for r in &rec {
        let (a, b) = closed_form(r.k);
        err = err.max((a.to_f64() - to_f64(&r.a)).abs()).max((b.to_f64() - to_f64(&r.b)).abs());
    }
    c.check("closed form vs recurrence, k <= 30", err <= 1e-9, format!("max |error| = {err:.3e}"));
    let e = eigen_analysis(30).unwrap();
    let lp = (1.0 + 33f64.sqrt()) / 4.0;
    c.check("lambda+ = (1+sqrt 33)/4", (e.lambda_plus - lp).abs() <= 1e-15, format!("{:.10}", e.lambda_plus));
    c.check(
        "exponent in [0.7535, 0.7537]",
        (0.7535..=0.7537).contains(&e.exponent),
        format!("log2 lambda+ = {:.7}; rounds to 0.754", e.exponent),
    );
}

// ---------------------------------------------------------------- 4

fn value_of(text: &str) -> GameSolution {
    randomized_complexity_unit(&parse(text).unwrap().to_truth_table().unwrap()).unwrap()
}

fn game_sandwich(c: &mut Criterion) {
    let and2 = value_of("x1&x2");
    let v = to_f64(&and2.value);
    c.check("x1&x2 = 2 +- 1e-6", (v - 2.0).abs() <= 1e-6, format!("{}", and2.value));
    let two_level = value_of("(x1&x2)|(x3&x4)");
    let v = to_f64(&two_level.value);
    c.check("(x1&x2)|(x3&x4) = 3 +- 1e-3", (v - 3.0).abs() <= 1e-3, format!("{}", two_level.value));
    let eps = 1e-9;
    let mut r = rng(4);
    let mut bad = Vec::new();
    for i in 0..50 {
        let n = 1 + i % 4;
        let f = loop {
            let bits: Vec<bool> = (0..1usize << n).map(|_| r.random_bool(0.5)).collect();
            let f = TruthTable::from_fn(n, |a| bits[a]).unwrap();
            if !f.is_constant() {
                break f;
            }
        };
        let s = randomized_complexity_unit(&f).unwrap();
        let (d0, d1) = certificate_pair(&f).unwrap();
        let lower = d0.unwrap().max(d1.unwrap()) as f64;
        let upper = decision_depth(&f).unwrap().depth as f64;
        let v = to_f64(&s.value);
        if !(lower - eps <= v && v <= upper + eps) {
            bad.push(f.to_hex());
        }
    }
    c.check("50 random functions: max(D0,D1) <= D_R <= D", bad.is_empty(), format!("{bad:?}"));
}

// ---------------------------------------------------------------- 5

fn sw_tightness(c: &mut Criterion) {
    for (text, l0, l1) in [("x1", q(1), q(1)), ("x1&x2", frac(3, 2), q(2)), ("(x1|x2)&(x3|x4)", frac(11, 4), q(3))] {
        let b = sw_lower_bound(&parse(text).unwrap()).unwrap();
        c.check(text, b.l0 == l0 && b.l1 == l1, format!("({}, {})", b.l0, b.l1));
    }
    let rec = recurrence_values(12).unwrap();
    let maxima: Vec<Q> = (0..=12)
        .map(|k| sw_lower_bound(&alternating_tree(k).unwrap()).unwrap().max().clone())
        .collect();
    let tight = (0..=8).all(|k| &maxima[k] == rec[k].max());
    c.check("alternating trees k <= 8: max = max(a_k, b_k)", tight, "exact");
    let lp = (1.0 + 33f64.sqrt()) / 4.0;
    let ratio = to_f64(&maxima[12]) / to_f64(&maxima[11]);
    c.check(
        "growth ratio within 1e-3 of lambda+ at k = 12",
        (ratio - lp).abs() <= 1e-3,
        format!("ratio {ratio:.6}, |error| {:.2e}; subdominant |lambda-/lambda+| = {:.3}", (ratio - lp).abs(), ((1.0 - 33f64.sqrt()) / 4.0 / lp).abs()),
    );
}

// ---------------------------------------------------------------- 6

fn random_bipartite(n: usize, p: f64, r: &mut ChaCha8Rng) -> BipartiteGraph {
    let edges: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| (1..=n).map(move |w| (u, w)))
        .filter(|_| r.random_bool(p))
        .collect();
    BipartiteGraph::new(n, edges).unwrap()
}

fn packing(c: &mut Criterion) {
    let mut r = rng(6);
    let mut packed = 0;
    let mut pairs = 0;
    while pairs < 1000 {
        let p = r.random_range(0.02..0.2);
        let (g1, g2) = (random_bipartite(10, p, &mut r), random_bipartite(10, p, &mut r));
        if !bipartite_condition(&g1, &g2).unwrap().holds {
            continue;
        }
        if let PackingResult::Packed { u_perm, w_perm, .. } = pack_by_swaps(&g1, &g2, pairs as u64).unwrap() {
            let image = g1.relabel(&u_perm, &w_perm).unwrap();
            if image.edges().iter().all(|&(u, w)| !g2.has_edge(u, w)) {
                packed += 1;
            }
        }
        pairs += 1;
    }
    c.check("1000 condition pairs, n = 10: verified packings", packed == 1000, format!("{packed}/1000"));
    // Agreement in the one-directional sense: a swap packing implies an
    // exhaustive packing, and so does the condition. Swap local minima on
    // packable pairs are legitimate heuristic misses and are only counted.
    let (mut unsound, mut condition_unpacked, mut misses) = (0, 0, 0);
    for i in 0..200u64 {
        let n = r.random_range(2..=5);
        let p = r.random_range(0.1..0.7);
        let (g1, g2) = (random_bipartite(n, p, &mut r), random_bipartite(n, p, &mut r));
        let swaps = pack_by_swaps(&g1, &g2, i).unwrap().is_packed();
        let exact = pack_exhaustive(&g1, &g2).unwrap().is_some();
        unsound += (swaps && !exact) as usize;
        misses += (!swaps && exact) as usize;
        condition_unpacked += (bipartite_condition(&g1, &g2).unwrap().holds && !exact) as usize;
    }
    c.check(
        "200 pairs, n <= 5: swaps Packed => exhaustive packs",
        unsound == 0,
        format!("{unsound} unsound; {misses} swap local minima on packable pairs"),
    );
    c.check("200 pairs, n <= 5: condition => exhaustive packs", condition_unpacked == 0, format!("{condition_unpacked}"));
    let k3 = Graph::cliques(6, &[3]).unwrap();
    let two_k3 = Graph::cliques(6, &[3, 3]).unwrap();
    let none = pack_exhaustive_general(&k3, &two_k3).unwrap();
    c.check("K3 vs 2K3 not packable", none.is_none(), format!("{none:?}"));
}

// ---------------------------------------------------------------- 7

fn evasiveness(c: &mut Criterion) {
    for (name, size, want) in [
        ("connected", 4, 6),
        ("no-isolated-vertex", 4, 6),
        ("bip-perfect-matching", 3, 9),
        ("bip-no-isolated-u", 3, 9),
    ] {
        let f = property_to_function(&property_by_name(name, size).unwrap()).unwrap();
        let d = decision_depth(&f).unwrap().depth;
        c.check(format!("{name} ({size}): D = {want}"), d == want && !f.is_constant() && f.is_monotone(), format!("D = {d}"));
    }
    for v in 3..=6 {
        let p = isolated_vertex_parity(v).unwrap();
        c.check(
            format!("isolated-vertex parity v = {v}"),
            p.enumerated && p.count_mod2 == p.closed_form_mod2,
            format!("count {}", p.count),
        );
    }
    let mut r = rng(7);
    let (mut worst_linear, mut worst_balanced, mut wrong) = (0i64, 0i64, 0);
    for _ in 0..100 {
        let n = r.random_range(2..=16usize);
        let mut beats = vec![vec![false; n + 1]; n + 1];
        for i in 1..=n {
            for j in i + 1..=n {
                let b = r.random_bool(0.5);
                beats[i][j] = b;
                beats[j][i] = !b;
            }
        }
        // Plant a champion in about half the tournaments.
        if r.random_bool(0.5) {
            let mut order: Vec<usize> = (1..=n).collect();
            order.shuffle(&mut r);
            let champ = order[0];
            for j in (1..=n).filter(|&j| j != champ) {
                beats[champ][j] = true;
                beats[j][champ] = false;
            }
        }
        let truth = (1..=n).any(|i| (1..=n).all(|j| j == i || beats[i][j]));
        let log2 = (usize::BITS - 1 - n.leading_zeros()) as i64;
        for (bracket, bound, worst) in [
            (Bracket::Linear, 2 * n as i64 - 3, &mut worst_linear),
            (Bracket::Balanced, 2 * n as i64 - log2, &mut worst_balanced),
        ] {
            let mut oracle = |i: usize, j: usize| if beats[i][j] { i } else { j };
            let out = tournament_algorithm(n, &mut oracle, bracket).unwrap();
            if out.answer != truth {
                wrong += 1;
            }
            *worst = (*worst).max(out.queries as i64 - bound);
        }
    }
    c.check("tournaments: answers match brute force", wrong == 0, format!("{wrong} wrong"));
    c.check("linear bracket <= 2n-3", worst_linear <= 0, format!("max excess {worst_linear}"));
    c.check("balanced bracket <= 2n-floor(log2 n)", worst_balanced <= 0, format!("max excess {worst_balanced}"));
}

// ---------------------------------------------------------------- 8

fn pipeline(c: &mut Criterion) {
    let report = lower_bound_pipeline(&property_by_name("bip-has-edge", 3).unwrap()).unwrap();
    c.check("G1 = single edge", report.g1.edges() == [(1, 1)], format!("{:?}", report.g1.edges()));
    c.check("G2 = K33", report.g2 == BipartiteGraph::complete(3).unwrap(), format!("{} edges", report.g2.edge_count()));
    c.check("non-packing verified", report.non_packing_verified, "");
    let nine = report.yao.iter().any(|y| y.with_factor_n == q(9));
    c.check("Yao n*d_max/d_avg = 9 = n^2", nine, format!("{:?}", report.yao.iter().map(|y| y.with_factor_n.to_string()).collect::<Vec<_>>()));
    c.check("constants flag c = 1", report.constants_flag.c == 1, "");
    c.check(
        "failing improved conditions identified",
        !report.improved_condition.failing.is_empty() && !report.improved_condition.holds,
        format!("{:?}", report.improved_condition.failing),
    );
}

// ---------------------------------------------------------------- 9

fn evlab(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_evlab")).args(args).output().expect("evlab runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn determinism(c: &mut Criterion) {
    let golden: &[(&str, &[&str])] = &[
        ("audit_monotone_n3.json", &["audit", "--kind", "monotone", "--n", "3"]),
        ("audit_monotone_n4.json", &["audit", "--kind", "monotone", "--n", "4"]),
        ("recurrence_k30.json", &["recurrence", "--k", "30", "--format", "json"]),
        ("swbound_alternating_12.json", &["swbound", "--alternating", "12"]),
        ("pipeline_bip_has_edge_3x3.json", &["pipeline", "--property", "bip-has-edge", "--size", "3x3"]),
    ];
    let update = std::env::var_os("EVLAB_UPDATE_GOLDEN").is_some();
    for (file, args) in golden {
        let (code, out) = evlab(args);
        let path = golden_dir().join(file);
        if update {
            std::fs::write(&path, &out).unwrap();
        }
        let expected = std::fs::read(&path).unwrap_or_default();
        c.check(format!("golden {file}"), code == 0 && out == expected, format!("{} bytes", out.len()));
    }
    let seeded: &[&[&str]] = &[
        &["simulate", "--k", "3", "--trials", "50000", "--seed", "11"],
        &["simulate", "--k", "4", "--input", "1011001110001111", "--trials", "20000", "--seed", "3"],
        &["audit", "--kind", "certificate-product", "--n", "7", "--sample", "64", "--seed", "5", "--summary-only"],
        &["audit", "--kind", "cyclic", "--n", "5"],
        &["recurrence", "--k", "30"],
    ];
    for args in golden.iter().map(|g| g.1).chain(seeded.iter().copied()) {
        let (c1, first) = evlab(args);
        let (c2, second) = evlab(args);
        let mut seq_args = vec!["--sequential"];
        seq_args.extend_from_slice(args);
        let (c3, sequential) = evlab(&seq_args);
        c.check(
            format!("byte-identical x2 and --sequential: {}", args.join(" ")),
            c1 == 0 && c2 == 0 && c3 == 0 && first == second && first == sequential,
            "",
        );
    }
}

type Runner = fn(&mut Criterion);

#[test]
fn acceptance() {
    let criteria: Vec<(Criterion, Runner)> = vec![
        (Criterion::new(1, "Monotone audit", "exact, zero exceptions", 10), monotone_audit),
        (Criterion::new(2, "Cyclic audit", "exact, zero exceptions", 30), cyclic_audit),
        (Criterion::new(3, "NAND-tree exactness", "exact; closed form 1e-9; exponent range", 60), nand_exactness),
        (Criterion::new(4, "Game-solver sandwich", "1e-6 / 1e-3 / eps 1e-9", 300), game_sandwich),
        (Criterion::new(5, "Saks-Wigderson tightness", "exact; growth 1e-3", 10), sw_tightness),
        (Criterion::new(6, "Packing soundness/completeness", "exact counts", 120), packing),
        (Criterion::new(7, "Graph-property evasiveness", "exact", 120), evasiveness),
        (Criterion::new(8, "Pipeline ingredients", "exact", 10), pipeline),
        (Criterion::new(9, "Determinism", "byte-identical", 300), determinism),
    ];
    let mut unexpected = Vec::new();
    let mut lines = Vec::new();
    for (mut c, run) in criteria {
        let start = Instant::now();
        run(&mut c);
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let pass = in_time && c.checks.iter().all(|k| k.pass);
        lines.push(format!(
            "criterion {} {:<32} {}  tolerance: {}  runtime: {:.2}s (limit {}s)",
            c.id,
            c.title,
            if pass { "PASS" } else { "FAIL" },
            c.tolerance,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        ));
        if !in_time {
            lines.push("    - runtime limit exceeded".into());
        }
        for k in c.checks.iter().filter(|k| k.pass && k.detail.contains("local minima")) {
            lines.push(format!("    - {}: {}", k.label, k.detail));
        }
        for k in c.checks.iter().filter(|k| !k.pass) {
            let known = UNATTAINABLE.contains(&k.label.as_str());
            lines.push(format!(
                "    - {} FAIL{}: {}",
                k.label,
                if known { " (unattainable target)" } else { "" },
                k.detail
            ));
            if !known {
                unexpected.push(format!("criterion {}: {}: {}", c.id, k.label, k.detail));
            }
        }
    }
    println!("{}", lines.join("\n"));
    assert!(unexpected.is_empty(), "unexpected failures:\n{}", unexpected.join("\n"));
}
