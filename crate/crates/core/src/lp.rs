//! Dense exact linear programming: two-phase tableau simplex with Bland's
//! rule, plus the pieces built on it (matrix games, Farkas alternatives).

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{from_f64, one, to_f64, zero, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

/// Maximize `objective · x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    obj: Vec<Q>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    if !pv.is_zero() {
                        *v -= &factor * pv;
                    }
                }
            }
        }
        if !self.obj[c].is_zero() {
            let factor = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Installs `cost` (maximized) as the reduced-cost row for the current
    /// basis.
    fn set_objective(&mut self, cost: &[Q]) {
        let mut obj: Vec<Q> = cost.to_vec();
        obj.resize(self.width + 1, zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if !cb.is_zero() {
                for (v, a) in obj.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * a;
                }
            }
        }
        self.obj = obj;
    }

    /// Bland's rule: lowest-index improving column, then lowest-index basic
    /// variable among ratio ties. Returns false if unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(c) = (0..self.width).find(|&j| allowed[j] && self.obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.objective.len();
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: c.coeffs.len(),
            });
        }
    }
    // Normalize to nonnegative right-hand sides.
    let cons: Vec<(Vec<Q>, Relation, Q)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs.is_negative() {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs.clone())
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();
    let m = cons.len();
    let slacks = cons.iter().filter(|c| c.1 != Relation::Eq).count();
    let artificials = cons.iter().filter(|c| c.1 != Relation::Le).count();
    let width = n + slacks + artificials;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut a) = (n, n + slacks);
    for (coeffs, rel, rhs) in &cons {
        let mut row = coeffs.clone();
        row.resize(width + 1, zero());
        row[width] = rhs.clone();
        match rel {
            Relation::Le => {
                row[s] = one();
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -one();
                s += 1;
                row[a] = one();
                basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = one();
                basis.push(a);
                a += 1;
            }
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        width,
    };
    let first_art = n + slacks;
    if artificials > 0 {
        let mut cost = vec![zero(); width];
        for c in cost.iter_mut().skip(first_art) {
            *c = -one();
        }
        t.set_objective(&cost);
        t.optimize(&vec![true; width]);
        // obj[rhs] holds −(phase-one value)
        if !t.obj[width].is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= first_art {
                match (0..first_art).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => {
                        t.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }
    let mut cost = lp.objective.clone();
    cost.resize(width, zero());
    t.set_objective(&cost);
    let allowed: Vec<bool> = (0..width).map(|j| j < first_art).collect();
    if !t.optimize(&allowed) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[i][width].clone();
        }
    }
    let value = lp
        .objective
        .iter()
        .zip(&x)
        .fold(zero(), |acc, (c, v)| acc + c * v);
    Ok(LpOutcome::Optimal { x, value })
}

/// Largest dimension solved exactly; larger games use multiplicative weights.
pub const MAX_EXACT_GAME: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct MatrixGameSolution {
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
    /// Maximizer's mixed strategy over rows.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub row_mix: Vec<Q>,
    /// Minimizer's mixed strategy over columns.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub col_mix: Vec<Q>,
    /// `max_i (M·col)_i − min_j (row·M)_j`, computed exactly.
    #[serde(with = "crate::rational::serde_q")]
    pub gap: Q,
    pub exact: bool,
}

fn check_matrix(m: &[Vec<Q>]) -> Result<usize> {
    let cols = m.first().map(Vec::len).unwrap_or(0);
    if m.is_empty() || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if let Some(r) = m.iter().find(|r| r.len() != cols) {
        return Err(Error::SizeMismatch {
            expected: cols,
            got: r.len(),
        });
    }
    Ok(cols)
}

/// `max_i (M·col)_i − min_j (row·M)_j` for the given mixes.
pub fn duality_gap(m: &[Vec<Q>], row_mix: &[Q], col_mix: &[Q]) -> Q {
    let upper = m
        .iter()
        .map(|r| r.iter().zip(col_mix).fold(zero(), |a, (v, p)| a + v * p))
        .max()
        .unwrap_or_else(zero);
    let cols = col_mix.len();
    let lower = (0..cols)
        .map(|j| m.iter().zip(row_mix).fold(zero(), |a, (r, q)| a + &r[j] * q))
        .min()
        .unwrap_or_else(zero);
    upper - lower
}

/// Rows maximize, columns minimize. Exact (gap 0) when both dimensions are
/// at most [`MAX_EXACT_GAME`]; otherwise multiplicative weights until the
/// exact gap of the rounded mixes is within `tolerance`.
pub fn solve_matrix_game(m: &[Vec<Q>], tolerance: &Q) -> Result<MatrixGameSolution> {
    let cols = check_matrix(m)?;
    let rows = m.len();
    if rows > MAX_EXACT_GAME || cols > MAX_EXACT_GAME {
        return solve_mwu(m, tolerance);
    }
    let min = m.iter().flatten().min().expect("nonempty").clone();
    let shift = if min.is_positive() { zero() } else { one() - min };
    let shifted: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|v| v + &shift).collect()).collect();

    // Row player: min Σy s.t. yᵀM' ≥ 1, value 1/Σy.
    let row_lp = LinearProgram {
        objective: vec![-one(); rows],
        constraints: (0..cols)
            .map(|j| Constraint {
                coeffs: shifted.iter().map(|r| r[j].clone()).collect(),
                relation: Relation::Ge,
                rhs: one(),
            })
            .collect(),
    };
    // Column player: max Σz s.t. M'z ≤ 1.
    let col_lp = LinearProgram {
        objective: vec![one(); cols],
        constraints: shifted
            .iter()
            .map(|r| Constraint {
                coeffs: r.clone(),
                relation: Relation::Le,
                rhs: one(),
            })
            .collect(),
    };
    let (LpOutcome::Optimal { x: y, value: ny }, LpOutcome::Optimal { x: z, value: sz }) =
        (solve_lp(&row_lp)?, solve_lp(&col_lp)?)
    else {
        return Err(Error::Degenerate("game LP not solvable"));
    };
    let sy = -ny;
    let row_mix: Vec<Q> = y.iter().map(|v| v / &sy).collect();
    let col_mix: Vec<Q> = z.iter().map(|v| v / &sz).collect();
    let value = one() / sz - &shift;
    let gap = duality_gap(m, &row_mix, &col_mix);
    Ok(MatrixGameSolution {
        value,
        row_mix,
        col_mix,
        gap,
        exact: true,
    })
}

fn normalize(w: &[f64]) -> Vec<Q> {
    let qs: Vec<Q> = w.iter().map(|&v| from_f64(v.max(0.0))).collect();
    let total = qs.iter().fold(zero(), |a, b| a + b);
    qs.into_iter().map(|v| v / &total).collect()
}

fn solve_mwu(m: &[Vec<Q>], tolerance: &Q) -> Result<MatrixGameSolution> {
    let rows = m.len();
    let cols = m[0].len();
    let mf: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let lo = mf.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let hi = mf.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    let mut wr = vec![1.0f64; rows];
    let mut wc = vec![1.0f64; cols];
    let mut avg_r = vec![0.0f64; rows];
    let mut avg_c = vec![0.0f64; cols];
    let eta = 0.05;
    let max_rounds = 200_000usize;
    let mut last = None;
    for round in 1..=max_rounds {
        let sr: f64 = wr.iter().sum();
        let sc: f64 = wc.iter().sum();
        let pr: Vec<f64> = wr.iter().map(|w| w / sr).collect();
        let pc: Vec<f64> = wc.iter().map(|w| w / sc).collect();
        for (a, p) in avg_r.iter_mut().zip(&pr) {
            *a += p;
        }
        for (a, p) in avg_c.iter_mut().zip(&pc) {
            *a += p;
        }
        // rows gain on high payoff against the column mix, columns on low
        for (i, w) in wr.iter_mut().enumerate() {
            let u: f64 = mf[i].iter().zip(&pc).map(|(v, p)| v * p).sum();
            *w *= (eta * (u - lo) / span).exp();
        }
        for (j, w) in wc.iter_mut().enumerate() {
            let u: f64 = mf.iter().zip(&pr).map(|(r, p)| r[j] * p).sum();
            *w *= (-eta * (u - lo) / span).exp();
        }
        let mr = wr.iter().cloned().fold(0.0, f64::max);
        wr.iter_mut().for_each(|w| *w /= mr);
        let mc = wc.iter().cloned().fold(0.0, f64::max);
        wc.iter_mut().for_each(|w| *w /= mc);
        if round % 500 == 0 || round == max_rounds {
            let row_mix = normalize(&avg_r);
            let col_mix = normalize(&avg_c);
            let gap = duality_gap(m, &row_mix, &col_mix);
            let done = gap <= *tolerance;
            last = Some((row_mix, col_mix, gap));
            if done {
                break;
            }
        }
    }
    let (row_mix, col_mix, gap) = last.expect("at least one check");
    if gap > *tolerance {
        return Err(Error::NoConvergence {
            iterations: max_rounds,
            gap: crate::rational::format_q(&gap),
        });
    }
    let upper = m
        .iter()
        .map(|r| r.iter().zip(&col_mix).fold(zero(), |a, (v, p)| a + v * p))
        .max()
        .expect("nonempty");
    Ok(MatrixGameSolution {
        value: upper,
        row_mix,
        col_mix,
        gap,
        exact: false,
    })
}

/// `A x ≤ b` with `x` free.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearSystem {
    #[serde(with = "q_matrix")]
    pub a: Vec<Vec<Q>>,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub b: Vec<Q>,
}

mod q_matrix {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        m.iter()
            .map(|r| r.iter().map(crate::rational::format_q).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let raw: Vec<Vec<String>> = Vec::deserialize(d)?;
        raw.iter()
            .map(|r| {
                r.iter()
                    .map(|s| crate::rational::parse_q(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FarkasCandidate {
    Solution(Vec<Q>),
    /// `λ ≥ 0` with `λᵀA = 0` and `λᵀb < 0`.
    Certificate(Vec<Q>),
}

impl LinearSystem {
    fn dims(&self) -> Result<(usize, usize)> {
        let m = self.a.len();
        if self.b.len() != m {
            return Err(Error::SizeMismatch {
                expected: m,
                got: self.b.len(),
            });
        }
        let n = self.a.first().map(Vec::len).unwrap_or(0);
        if let Some(r) = self.a.iter().find(|r| r.len() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                got: r.len(),
            });
        }
        Ok((m, n))
    }
}

pub fn verify_farkas(system: &LinearSystem, candidate: &FarkasCandidate) -> Result<bool> {
    let (m, n) = system.dims()?;
    match candidate {
        FarkasCandidate::Solution(x) => {
            if x.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: x.len(),
                });
            }
            Ok(system.a.iter().zip(&system.b).all(|(row, bi)| {
                row.iter().zip(x).fold(zero(), |acc, (a, v)| acc + a * v) <= *bi
            }))
        }
        FarkasCandidate::Certificate(lambda) => {
            if lambda.len() != m {
                return Err(Error::SizeMismatch {
                    expected: m,
                    got: lambda.len(),
                });
            }
            let nonneg = lambda.iter().all(|l| !l.is_negative());
            let combo_zero = (0..n).all(|j| {
                system
                    .a
                    .iter()
                    .zip(lambda)
                    .fold(zero(), |acc, (r, l)| acc + &r[j] * l)
                    .is_zero()
            });
            let lb = system.b.iter().zip(lambda).fold(zero(), |acc, (b, l)| acc + b * l);
            Ok(nonneg && combo_zero && lb.is_negative())
        }
    }
}

/// Either a solution of `Ax ≤ b` or a Farkas certificate of infeasibility.
pub fn farkas_solve(system: &LinearSystem) -> Result<FarkasCandidate> {
    let (m, n) = system.dims()?;
    // x = x⁺ − x⁻
    let feas = LinearProgram {
        objective: vec![zero(); 2 * n],
        constraints: system
            .a
            .iter()
            .zip(&system.b)
            .map(|(row, bi)| Constraint {
                coeffs: row.iter().cloned().chain(row.iter().map(|v| -v)).collect(),
                relation: Relation::Le,
                rhs: bi.clone(),
            })
            .collect(),
    };
    if let LpOutcome::Optimal { x, .. } = solve_lp(&feas)? {
        return Ok(FarkasCandidate::Solution(
            (0..n).map(|j| &x[j] - &x[n + j]).collect(),
        ));
    }
    // max −bᵀλ s.t. Aᵀλ = 0, Σλ ≤ 1
    let mut constraints: Vec<Constraint> = (0..n)
        .map(|j| Constraint {
            coeffs: system.a.iter().map(|r| r[j].clone()).collect(),
            relation: Relation::Eq,
            rhs: zero(),
        })
        .collect();
    constraints.push(Constraint {
        coeffs: vec![one(); m],
        relation: Relation::Le,
        rhs: one(),
    });
    let cert = LinearProgram {
        objective: system.b.iter().map(|v| -v).collect(),
        constraints,
    };
    match solve_lp(&cert)? {
        LpOutcome::Optimal { x, value } if value.is_positive() => Ok(FarkasCandidate::Certificate(x)),
        _ => Err(Error::Degenerate("neither a solution nor a certificate found")),
    }
}
