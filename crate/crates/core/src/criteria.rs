//! Arithmetic and topological evasiveness criteria.
//!
//! Euler characteristics use the reduced-count convention
//! `χ(K) = Σ_{S∈K, S≠∅} (−1)^{|S|}`: the empty face is excluded, so a
//! contractible complex has `χ = −1` (other texts report `1 + χ`).

use serde::Serialize;

use crate::boolfn::{enumerate_monotone, PermutationGroup, TruthTable};
use crate::det::{certificate_pair, DepthSolver};
use crate::error::{Error, Result};
use crate::par::ExecPolicy;

fn sign(k: u32) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `μ(f) = Σ_{f(x)=1} (−1)^{|x|}`.
pub fn mu(f: &TruthTable) -> i64 {
    f.ones().map(|a| sign(a.count_ones())).sum()
}

/// `μ` through `μ(f) = μ(f|x₁=0) − μ(f|x₁=1)`.
pub fn mu_recursive(f: &TruthTable) -> i64 {
    if f.n() == 0 {
        return f.get(0) as i64;
    }
    mu_recursive(&f.restrict_var(1, false).expect("n ≥ 1"))
        - mu_recursive(&f.restrict_var(1, true).expect("n ≥ 1"))
}

/// Integer polynomial, coefficient `k` multiplies `t^k`. Trailing zeros are
/// trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct IntPolynomial {
    coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * t + c)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::new(Vec::new());
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    /// `(1+t)^k`.
    pub fn one_plus_t_pow(k: usize) -> IntPolynomial {
        let mut c = vec![1i128];
        for _ in 0..k {
            let mut next = vec![0i128; c.len() + 1];
            for (i, v) in c.iter().enumerate() {
                next[i] += v;
                next[i + 1] += v;
            }
            c = next;
        }
        IntPolynomial::new(c)
    }

    /// Exact division by `1 + t`, or `None` if there is a remainder.
    pub fn div_one_plus_t(&self) -> Option<IntPolynomial> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // synthetic division from the top: c_k = q_k + q_{k-1}
        let d = self.coeffs.len() - 1;
        if d == 0 {
            return None;
        }
        let mut q = vec![0i128; d];
        q[d - 1] = self.coeffs[d];
        for k in (1..d).rev() {
            q[k - 1] = self.coeffs[k] - q[k];
        }
        (self.coeffs[0] == q[0]).then(|| IntPolynomial::new(q))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightPolynomial {
    pub p: IntPolynomial,
    pub divisible: bool,
    pub quotient: Option<IntPolynomial>,
}

/// `p_f(t) = Σ_x f(x) t^{|x|}` and whether `(1+t)^{n−d}` divides it.
pub fn weight_polynomial(f: &TruthTable, d: usize) -> Result<WeightPolynomial> {
    if d > f.n() {
        return Err(Error::OutOfRange {
            name: "D",
            value: d as i64,
            range: "0 ≤ D ≤ n",
        });
    }
    let mut c = vec![0i128; f.n() + 1];
    for a in f.ones() {
        c[a.count_ones() as usize] += 1;
    }
    let p = IntPolynomial::new(c);
    let mut q = Some(p.clone());
    for _ in 0..f.n() - d {
        q = q.and_then(|q| q.div_one_plus_t());
    }
    Ok(WeightPolynomial {
        p,
        divisible: q.is_some(),
        quotient: q,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MobiusCheck {
    /// `(∇f)(y)` indexed like the truth table.
    pub values: Vec<i64>,
    /// Vanishing for every `|y| < n − D`.
    pub strict: bool,
    /// Vanishing for every `|y| ≤ n − D`.
    pub weak: bool,
}

pub const MAX_MOBIUS_VARS: usize = 14;

/// `(∇f)(y) = Σ_{x ≥ y} (−1)^{|x−y|} f(x)`.
pub fn mobius_transform(f: &TruthTable) -> Vec<i64> {
    let mut g: Vec<i64> = (0..f.len()).map(|a| f.get(a) as i64).collect();
    for i in 0..f.n() {
        let bit = 1 << i;
        for y in 0..g.len() {
            if y & bit == 0 {
                g[y] -= g[y | bit];
            }
        }
    }
    g
}

pub fn mobius_check(f: &TruthTable, d: usize) -> Result<MobiusCheck> {
    if f.n() > MAX_MOBIUS_VARS {
        return Err(Error::VariableCount {
            n: f.n(),
            max: MAX_MOBIUS_VARS,
        });
    }
    if d > f.n() {
        return Err(Error::OutOfRange {
            name: "D",
            value: d as i64,
            range: "0 ≤ D ≤ n",
        });
    }
    let values = mobius_transform(f);
    let bound = f.n() - d;
    let vanish = |inclusive: bool| {
        values.iter().enumerate().all(|(y, &v)| {
            let w = y.count_ones() as usize;
            let in_range = if inclusive { w <= bound } else { w < bound };
            !in_range || v == 0
        })
    };
    Ok(MobiusCheck {
        strict: vanish(false),
        weak: vanish(true),
        values,
    })
}

/// `K_f`: the sets `S` with `f(x^S) = 0`, for monotone `f ≢ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexView {
    f: TruthTable,
}

impl ComplexView {
    pub fn new(f: TruthTable) -> Result<Self> {
        if !f.is_monotone() {
            return Err(Error::NotMonotone);
        }
        if f.constant_value() == Some(true) {
            return Err(Error::EmptyComplex);
        }
        Ok(ComplexView { f })
    }

    pub fn function(&self) -> &TruthTable {
        &self.f
    }

    pub fn contains(&self, face: usize) -> bool {
        !self.f.get(face)
    }

    pub fn faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.f.len()).filter(|&a| !self.f.get(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexStats {
    pub chi: i64,
    pub facet_count: usize,
    pub face_count: usize,
}

pub fn complex_stats(view: &ComplexView) -> ComplexStats {
    let n = view.f.n();
    let mut chi = 0;
    let mut facet_count = 0;
    let mut face_count = 0;
    for s in view.faces() {
        face_count += 1;
        if s != 0 {
            chi += sign(s.count_ones());
        }
        if (0..n).all(|i| s >> i & 1 == 1 || !view.contains(s | 1 << i)) {
            facet_count += 1;
        }
    }
    ComplexStats {
        chi,
        facet_count,
        face_count,
    }
}

/// `χ(K_f) = −1 − μ(f)` for monotone `f ≢ 1` on `n ≥ 1` variables.
pub fn chi_via_mu(view: &ComplexView) -> i64 {
    if view.f.n() == 0 {
        0
    } else {
        -1 - mu(&view.f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexOutcome {
    Complex(ComplexView),
    /// The restriction is identically 1; no faces at all.
    Empty,
}

fn outcome(f: TruthTable) -> Result<ComplexOutcome> {
    if f.constant_value() == Some(true) {
        Ok(ComplexOutcome::Empty)
    } else {
        ComplexView::new(f).map(ComplexOutcome::Complex)
    }
}

/// `(K∖v, K⋉v)` as the complexes of `f|x_v=0` and `f|x_v=1`.
pub fn complex_minus_link(view: &ComplexView, v: usize) -> Result<(ComplexOutcome, ComplexOutcome)> {
    let minus = outcome(view.f.restrict_var(v, false)?)?;
    let link = outcome(view.f.restrict_var(v, true)?)?;
    Ok((minus, link))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IsolatedVertexParity {
    pub v: usize,
    pub count: u128,
    pub enumerated: bool,
    pub count_mod2: u8,
    pub closed_form_mod2: u8,
}

fn binomial(n: u64, k: u64) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Graphs on `v` labeled vertices without an isolated vertex: enumerated for
/// `v ≤ 6`, inclusion–exclusion beyond.
pub fn isolated_vertex_parity(v: usize) -> Result<IsolatedVertexParity> {
    if !(2..=12).contains(&v) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v as i64,
            range: "2 ≤ v ≤ 12",
        });
    }
    let (count, enumerated) = if v <= 6 {
        let edges: Vec<(usize, usize)> = (0..v)
            .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
            .collect();
        let full = (1usize << v) - 1;
        let count = (0..1usize << edges.len())
            .filter(|&g| {
                let covered = edges
                    .iter()
                    .enumerate()
                    .filter(|(e, _)| g >> e & 1 == 1)
                    .fold(0usize, |m, (_, &(a, b))| m | 1 << a | 1 << b);
                covered == full
            })
            .count() as u128;
        (count, true)
    } else {
        let v = v as u64;
        let total: i128 = (0..=v)
            .map(|k| {
                let m = v - k;
                let s = if k % 2 == 0 { 1 } else { -1 };
                s * binomial(v, k) * (1i128 << (m * m.saturating_sub(1) / 2))
            })
            .sum();
        (total as u128, false)
    };
    // (−1)^{v−1}·v + (−1)^v has the parity of v − 1
    let closed = (v as i64 - 1).rem_euclid(2) as u8;
    Ok(IsolatedVertexParity {
        v,
        count,
        enumerated,
        count_mod2: (count % 2) as u8,
        closed_form_mod2: closed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditRecord {
    pub bits_hex: String,
    #[serde(rename = "D")]
    pub depth: usize,
    pub d0: Option<usize>,
    pub d1: Option<usize>,
    pub mu: i64,
    /// `None` when `f ≡ 1`.
    pub chi: Option<i64>,
    pub chi_via_mu: Option<i64>,
    pub mu_implies_evasive: bool,
    /// Non-evasive ⇒ `χ = −1`; vacuous (true) when evasive.
    pub nonevasive_implies_contractible_chi: bool,
    pub poly_divisible: bool,
    pub mobius_strict: bool,
    pub mobius_weak: bool,
    pub ones_divisible: bool,
    pub d_le_d0d1: bool,
}

impl AuditRecord {
    /// The properties the audit asserts (the weak Möbius form is recorded
    /// only).
    pub fn holds(&self) -> bool {
        self.mu_implies_evasive
            && self.nonevasive_implies_contractible_chi
            && self.poly_divisible
            && self.mobius_strict
            && self.ones_divisible
            && self.d_le_d0d1
            && self.chi == self.chi_via_mu
    }
}

pub fn audit_function(f: &TruthTable) -> Result<AuditRecord> {
    let n = f.n();
    let depth = DepthSolver::new().depth(f)?;
    let (d0, d1) = certificate_pair(f)?;
    let m = mu(f);
    let (chi, chi2) = if f.is_monotone() && f.constant_value() != Some(true) {
        let view = ComplexView::new(f.clone())?;
        (Some(complex_stats(&view).chi), Some(chi_via_mu(&view)))
    } else {
        (None, None)
    };
    let wp = weight_polynomial(f, depth)?;
    let mc = mobius_check(f, depth)?;
    Ok(AuditRecord {
        bits_hex: f.to_hex(),
        depth,
        d0,
        d1,
        mu: m,
        chi,
        chi_via_mu: chi2,
        mu_implies_evasive: m == 0 || depth == n,
        nonevasive_implies_contractible_chi: depth == n || chi.is_none_or(|c| c == -1),
        poly_divisible: wp.divisible,
        mobius_strict: mc.strict,
        mobius_weak: mc.weak,
        ones_divisible: f.count_ones().is_multiple_of(1u64 << (n - depth)),
        d_le_d0d1: match (d0, d1) {
            (Some(a), Some(b)) => depth <= a * b,
            _ => depth == 0,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub functions: usize,
    pub evasive: usize,
    pub violations: usize,
    pub mobius_weak_failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub summary: AuditSummary,
    pub records: Vec<AuditRecord>,
}

fn summarize(n: usize, records: Vec<AuditRecord>) -> AuditReport {
    let summary = AuditSummary {
        functions: records.len(),
        evasive: records.iter().filter(|r| r.depth == n).count(),
        violations: records.iter().filter(|r| !r.holds()).count(),
        mobius_weak_failures: records.iter().filter(|r| !r.mobius_weak).count(),
    };
    AuditReport {
        n,
        summary,
        records,
    }
}

/// Every monotone function on `n` variables, in enumeration order.
pub fn monotone_audit(n: usize, policy: ExecPolicy) -> Result<AuditReport> {
    let fs: Vec<TruthTable> = enumerate_monotone(n)?.collect();
    let records = policy
        .map(&fs, audit_function)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(n, records))
}

/// Orbit number of every input index under cyclic rotation of the
/// variables, and the orbit count. Orbits are numbered by smallest member.
pub fn rotation_orbits(n: usize) -> Result<(Vec<usize>, usize)> {
    if n == 0 || n > 7 {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as i64,
            range: "1 ≤ n ≤ 7",
        });
    }
    let size = 1usize << n;
    let rot = |a: usize| ((a << 1) | (a >> (n - 1))) & (size - 1);
    let mut orbit_of = vec![usize::MAX; size];
    let mut orbits = 0;
    for a in 0..size {
        if orbit_of[a] == usize::MAX {
            let mut b = a;
            loop {
                orbit_of[b] = orbits;
                b = rot(b);
                if b == a {
                    break;
                }
            }
            orbits += 1;
        }
    }
    Ok((orbit_of, orbits))
}

/// The rotation-invariant function whose value on orbit `k` is bit `k` of
/// `pattern`.
pub fn rotation_invariant_function(n: usize, pattern: u64) -> Result<TruthTable> {
    let (orbit_of, _) = rotation_orbits(n)?;
    TruthTable::from_fn(n, |a| pattern >> orbit_of[a] & 1 == 1)
}

/// All functions invariant under cyclic rotation of the variables, ordered
/// by orbit pattern.
pub fn rotation_invariant_functions(n: usize) -> Result<Vec<TruthTable>> {
    let (orbit_of, orbits) = rotation_orbits(n)?;
    (0..1u64 << orbits)
        .map(|pattern| TruthTable::from_fn(n, |a| pattern >> orbit_of[a] & 1 == 1))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclicAudit {
    pub n: usize,
    pub invariant_functions: usize,
    /// Functions with `f(0…0) ≠ f(1…1)`.
    pub candidates: usize,
    pub evasive_candidates: usize,
    pub records: Vec<AuditRecord>,
}

/// Rotation-invariant functions separating the all-zeros and all-ones
/// inputs; for prime `n` each should be evasive.
pub fn cyclic_audit(n: usize, policy: ExecPolicy) -> Result<CyclicAudit> {
    let all = rotation_invariant_functions(n)?;
    let group = PermutationGroup::cyclic(n)?;
    let top = (1usize << n) - 1;
    let candidates: Vec<TruthTable> = all
        .iter()
        .filter(|f| f.get(0) != f.get(top))
        .cloned()
        .collect();
    debug_assert!(candidates
        .iter()
        .all(|f| f.invariance(&group).map(|i| i.invariant).unwrap_or(false)));
    let records = policy
        .map(&candidates, audit_function)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(CyclicAudit {
        n,
        invariant_functions: all.len(),
        candidates: candidates.len(),
        evasive_candidates: records.iter().filter(|r| r.depth == n).count(),
        records,
    })
}
