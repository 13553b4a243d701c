//! The randomized directional evaluator on NAND trees: at every gate pick a
//! child uniformly, and read the other child only if the first returned 1.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{nand_tree, Formula};
use crate::par::ExecPolicy;
use crate::rational::{frac, one, q, to_f64, zero, Q};

pub const MAX_WORST_CASE_K: usize = 4;
pub const MAX_RECURRENCE_K: usize = 64;

fn leaf_value(node: &Formula, input: &[bool]) -> Option<bool> {
    match node {
        Formula::Var { index } => Some(input[index - 1]),
        Formula::Not { child } => match child.as_ref() {
            Formula::Var { index } => Some(!input[index - 1]),
            _ => None,
        },
        _ => None,
    }
}

fn expect(node: &Formula, input: &[bool]) -> Result<(Q, bool)> {
    if let Some(v) = leaf_value(node, input) {
        return Ok((one(), v));
    }
    match node {
        Formula::Nand { left, right } => {
            let (el, vl) = expect(left, input)?;
            let (er, vr) = expect(right, input)?;
            let left_first = if vl { &el + &er } else { el.clone() };
            let right_first = if vr { &er + &el } else { er };
            Ok(((left_first + right_first) / q(2), !(vl && vr)))
        }
        Formula::Not { .. } => Err(Error::UnsupportedGate("negated gate")),
        Formula::And { .. } => Err(Error::UnsupportedGate("and")),
        Formula::Or { .. } => Err(Error::UnsupportedGate("or")),
        Formula::Var { .. } => unreachable!(),
    }
}

fn check_input(tree: &Formula, input: &[bool]) -> Result<()> {
    let n = tree.max_var();
    if input.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: input.len(),
        });
    }
    Ok(())
}

/// Exact expected number of leaves read on `input`; negated leaves cost one
/// query like plain ones.
pub fn exact_expected_queries(tree: &Formula, input: &[bool]) -> Result<Q> {
    check_input(tree, input)?;
    expect(tree, input).map(|(e, _)| e)
}

/// Value of a NAND-form tree on `input`.
pub fn nand_value(tree: &Formula, input: &[bool]) -> Result<bool> {
    check_input(tree, input)?;
    expect(tree, input).map(|(_, v)| v)
}

pub fn bits_of(a: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| a >> i & 1 == 1).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstCase {
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
    /// The first maximizing input in table-index order.
    pub witness: Vec<bool>,
    pub witness_index: usize,
    pub tree_value: bool,
}

/// Maximum of the exact expectation over all inputs of `tree`.
pub fn worst_case_of(tree: &Formula, policy: ExecPolicy) -> Result<WorstCase> {
    let n = tree.max_var();
    if n > 1 << MAX_WORST_CASE_K {
        return Err(Error::VariableCount {
            n,
            max: 1 << MAX_WORST_CASE_K,
        });
    }
    let values = policy.map_range(1usize << n, |a| expect(tree, &bits_of(a, n)));
    let mut best: Option<(usize, Q, bool)> = None;
    for (a, r) in values.into_iter().enumerate() {
        let (e, v) = r?;
        if best.as_ref().is_none_or(|(_, b, _)| e > *b) {
            best = Some((a, e, v));
        }
    }
    let (a, value, tree_value) = best.expect("at least one input");
    Ok(WorstCase {
        value,
        witness: bits_of(a, n),
        witness_index: a,
        tree_value,
    })
}

/// Worst case over the `2^{2^k}` inputs of the depth-`k` NAND tree.
pub fn worst_case_expectation(k: usize, policy: ExecPolicy) -> Result<WorstCase> {
    if k > MAX_WORST_CASE_K {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as i64,
            range: "0..=4",
        });
    }
    worst_case_of(&nand_tree(k)?, policy)
}

fn simulate(node: &Formula, input: &[bool], rng: &mut ChaCha8Rng, queries: &mut u64) -> bool {
    if let Some(v) = leaf_value(node, input) {
        *queries += 1;
        return v;
    }
    let Formula::Nand { left, right } = node else {
        unreachable!("validated before simulation")
    };
    let (first, second) = if rng.random_bool(0.5) {
        (left, right)
    } else {
        (right, left)
    };
    if !simulate(first, input, rng, queries) {
        return true;
    }
    !simulate(second, input, rng, queries)
}

#[derive(Debug, Clone, Serialize)]
pub struct McResult {
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub total_queries: u64,
}

/// Trials per RNG stream; chunk `j` draws from stream `j` of the seed.
pub const MC_CHUNK: u64 = 4096;

/// Seeded Monte Carlo estimate of the expected query count. Results are
/// identical under both execution policies.
pub fn mc_simulate(tree: &Formula, input: &[bool], trials: u64, seed: u64, policy: ExecPolicy) -> Result<McResult> {
    check_input(tree, input)?;
    expect(tree, input)?;
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0,
            range: "trials ≥ 1",
        });
    }
    let chunks = trials.div_ceil(MC_CHUNK) as usize;
    let sums = policy.map_range(chunks, |j| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        let count = MC_CHUNK.min(trials - j as u64 * MC_CHUNK);
        let (mut s, mut s2) = (0u64, 0u128);
        for _ in 0..count {
            let mut qn = 0u64;
            simulate(tree, input, &mut rng, &mut qn);
            s += qn;
            s2 += (qn as u128) * (qn as u128);
        }
        (s, s2)
    });
    let (sum, sumsq) = sums
        .into_iter()
        .fold((0u64, 0u128), |(a, b), (s, s2)| (a + s, b + s2));
    let nf = trials as f64;
    let mean = sum as f64 / nf;
    let stderr = if trials > 1 {
        // exact integer centering avoids cancellation
        let num = sumsq as f64 * nf - (sum as f64) * (sum as f64);
        (num.max(0.0) / (nf * nf * (nf - 1.0))).sqrt()
    } else {
        0.0
    };
    Ok(McResult {
        trials,
        seed,
        mean,
        stderr,
        total_queries: sum,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrencePair {
    pub k: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub a: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub b: Q,
}

impl RecurrencePair {
    pub fn max(&self) -> &Q {
        if self.a >= self.b {
            &self.a
        } else {
            &self.b
        }
    }
}

/// `(a_j, b_j) = [[1/2, 1], [2, 0]]^j (1, 1)` for `j = 0..=k`.
pub fn recurrence_values(k: usize) -> Result<Vec<RecurrencePair>> {
    if k > MAX_RECURRENCE_K {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as i64,
            range: "0..=64",
        });
    }
    let mut out = vec![RecurrencePair {
        k: 0,
        a: one(),
        b: one(),
    }];
    for j in 1..=k {
        let p = &out[j - 1];
        let a = &p.a * frac(1, 2) + &p.b;
        let b = &p.a * q(2);
        out.push(RecurrencePair { k: j, a, b });
    }
    Ok(out)
}

/// `u + v√33` with rational `u`, `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sqrt33 {
    pub u: Q,
    pub v: Q,
}

impl Sqrt33 {
    pub fn new(u: Q, v: Q) -> Self {
        Sqrt33 { u, v }
    }

    pub fn rational(u: Q) -> Self {
        Sqrt33 { u, v: zero() }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.u) + to_f64(&self.v) * 33f64.sqrt()
    }

    pub fn pow(&self, k: usize) -> Sqrt33 {
        (0..k).fold(Sqrt33::rational(one()), |acc, _| &acc * self)
    }
}

impl Add for &Sqrt33 {
    type Output = Sqrt33;
    fn add(self, o: &Sqrt33) -> Sqrt33 {
        Sqrt33::new(&self.u + &o.u, &self.v + &o.v)
    }
}

impl Sub for &Sqrt33 {
    type Output = Sqrt33;
    fn sub(self, o: &Sqrt33) -> Sqrt33 {
        Sqrt33::new(&self.u - &o.u, &self.v - &o.v)
    }
}

impl Neg for &Sqrt33 {
    type Output = Sqrt33;
    fn neg(self) -> Sqrt33 {
        Sqrt33::new(-&self.u, -&self.v)
    }
}

impl Mul for &Sqrt33 {
    type Output = Sqrt33;
    fn mul(self, o: &Sqrt33) -> Sqrt33 {
        Sqrt33::new(
            &self.u * &o.u + &self.v * &o.v * q(33),
            &self.u * &o.v + &self.v * &o.u,
        )
    }
}

impl Div for &Sqrt33 {
    type Output = Sqrt33;
    fn div(self, o: &Sqrt33) -> Sqrt33 {
        let norm = &o.u * &o.u - &o.v * &o.v * q(33);
        let conj = Sqrt33::new(o.u.clone(), -&o.v);
        let num = self * &conj;
        Sqrt33::new(num.u / &norm, num.v / norm)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenAnalysis {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `log₂ λ₊`: the leaf-count exponent of the expected cost.
    pub exponent: f64,
    pub checked_up_to: usize,
    /// Largest `|recurrence − closed form|` with the closed form evaluated
    /// exactly in `Q(√33)`.
    pub exact_max_abs_error: f64,
    /// Same comparison with the closed form evaluated in `f64`.
    pub float_max_rel_error: f64,
    /// `max(a_k, b_k) / max(a_{k-1}, b_{k-1})` for `k = 1..=checked_up_to`.
    pub growth_ratios: Vec<f64>,
}

/// Closed form `(a_k, b_k) = c₁λ₁^k(λ₁, 2) + c₂λ₂^k(λ₂, 2)` in `Q(√33)`.
pub fn closed_form(k: usize) -> (Sqrt33, Sqrt33) {
    let l1 = Sqrt33::new(frac(1, 4), frac(1, 4));
    let l2 = Sqrt33::new(frac(1, 4), frac(-1, 4));
    // c₁ + c₂ = 1/2 and c₁λ₁ + c₂λ₂ = 1
    let half = Sqrt33::rational(frac(1, 2));
    let c1 = &(&Sqrt33::rational(one()) - &(&half * &l2)) / &(&l1 - &l2);
    let c2 = &half - &c1;
    let p1 = l1.pow(k);
    let p2 = l2.pow(k);
    let two = Sqrt33::rational(q(2));
    let a = &(&(&c1 * &p1) * &l1) + &(&(&c2 * &p2) * &l2);
    let b = &two * &(&(&c1 * &p1) + &(&c2 * &p2));
    (a, b)
}

/// Dominant-eigenvalue term of `max(a_k, b_k)`: `max(c₁λ₊^{k+1}, 2c₁λ₊^k)`.
pub fn dominant_prediction(k: usize) -> f64 {
    let s = 33f64.sqrt();
    let (lp, lm) = ((1.0 + s) / 4.0, (1.0 - s) / 4.0);
    let c1 = (1.0 - 0.5 * lm) / (lp - lm);
    let base = c1 * lp.powi(k as i32);
    (base * lp).max(2.0 * base)
}

pub fn eigen_analysis(checked_up_to: usize) -> Result<EigenAnalysis> {
    let s = 33f64.sqrt();
    let lp = (1.0 + s) / 4.0;
    let lm = (1.0 - s) / 4.0;
    let rec = recurrence_values(checked_up_to)?;
    let c1 = (1.0 - 0.5 * lm) / (lp - lm);
    let c2 = 0.5 - c1;
    let mut exact_err = 0.0f64;
    let mut float_err = 0.0f64;
    for p in &rec {
        let (a, b) = closed_form(p.k);
        for (cf, r) in [(&a, &p.a), (&b, &p.b)] {
            let diff = Sqrt33::new(&cf.u - r, cf.v.clone());
            exact_err = exact_err.max(diff.to_f64().abs());
            if !diff.u.is_zero() || !diff.v.is_zero() {
                exact_err = exact_err.max(f64::MIN_POSITIVE);
            }
        }
        let k = p.k as i32;
        let af = c1 * lp.powi(k + 1) + c2 * lm.powi(k + 1);
        let bf = 2.0 * (c1 * lp.powi(k) + c2 * lm.powi(k));
        for (cf, r) in [(af, &p.a), (bf, &p.b)] {
            let r = to_f64(r);
            float_err = float_err.max((cf - r).abs() / r.abs());
        }
    }
    let growth_ratios = rec
        .windows(2)
        .map(|w| to_f64(&(w[1].max() / w[0].max())))
        .collect();
    Ok(EigenAnalysis {
        lambda_plus: lp,
        lambda_minus: lm,
        exponent: lp.log2(),
        checked_up_to,
        exact_max_abs_error: exact_err,
        float_max_rel_error: float_err,
        growth_ratios,
    })
}
