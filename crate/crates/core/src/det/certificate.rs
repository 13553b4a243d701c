//! Certificates and the canonical DNF/CNF built from minimal ones.

use serde::{Deserialize, Serialize};

use crate::boolfn::{Subcubes, TruthTable, HAS_ONE, HAS_ZERO};
use crate::error::{Error, Result};

use super::check_exact_cap;

/// `x_var = value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub value: bool,
}

impl Literal {
    pub fn holds(&self, a: usize) -> bool {
        (a >> (self.var - 1) & 1 == 1) == self.value
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Index of the input this certificate was computed for.
    pub input: usize,
    pub value: bool,
    /// Fixed literals, ascending by variable.
    pub literals: Vec<Literal>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateComplexity {
    pub value: bool,
    pub size: usize,
    /// One minimal certificate for every input attaining `size`.
    pub witnesses: Vec<Certificate>,
}

/// Steps through all `k`-subsets of `0..n` as bitmasks in lexicographic order
/// of their sorted index lists.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(usize) -> bool) -> bool {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return false;
    }
    loop {
        let mask = idx.iter().fold(0usize, |m, &i| m | 1 << i);
        if visit(mask) {
            return true;
        }
        // advance
        let mut j = k;
        loop {
            if j == 0 {
                return false;
            }
            j -= 1;
            if idx[j] < n - k + j {
                break;
            }
            if j == 0 {
                return false;
            }
        }
        idx[j] += 1;
        for t in j + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

fn min_mask(sub: &Subcubes, x: usize, want: u8) -> usize {
    let n = sub.n();
    for k in 0..=n {
        let mut found = None;
        for_each_subset(n, k, |mask| {
            if sub.flags(sub.index(mask, x)) == want {
                found = Some(mask);
                true
            } else {
                false
            }
        });
        if let Some(m) = found {
            return m;
        }
    }
    unreachable!("the full assignment is always a certificate")
}

/// For every input, the first smallest certificate mask (0-based bit
/// positions of the fixed variables).
pub fn min_certificate_masks(f: &TruthTable) -> Result<Vec<usize>> {
    check_exact_cap(f)?;
    let sub = Subcubes::new(f);
    Ok((0..f.len())
        .map(|x| min_mask(&sub, x, if f.get(x) { HAS_ONE } else { HAS_ZERO }))
        .collect())
}

fn literals(mask: usize, x: usize, flip: bool) -> Vec<Literal> {
    (0..usize::BITS as usize)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| Literal {
            var: i + 1,
            value: (x >> i & 1 == 1) != flip,
        })
        .collect()
}

/// `D_value(f)`: the largest minimal certificate over inputs with
/// `f(x) = value`.
pub fn certificate_complexity(f: &TruthTable, value: bool) -> Result<CertificateComplexity> {
    let masks = min_certificate_masks(f)?;
    let inputs: Vec<usize> = (0..f.len()).filter(|&x| f.get(x) == value).collect();
    if inputs.is_empty() {
        return Err(Error::ValueNotAttained(value as u8));
    }
    let size = inputs
        .iter()
        .map(|&x| masks[x].count_ones() as usize)
        .max()
        .unwrap_or(0);
    let witnesses = inputs
        .iter()
        .filter(|&&x| masks[x].count_ones() as usize == size)
        .map(|&x| Certificate {
            input: x,
            value,
            literals: literals(masks[x], x, false),
        })
        .collect();
    Ok(CertificateComplexity {
        value,
        size,
        witnesses,
    })
}

/// `(D_0, D_1)`; a side is `None` when the value is never attained.
pub fn certificate_pair(f: &TruthTable) -> Result<(Option<usize>, Option<usize>)> {
    let masks = min_certificate_masks(f)?;
    let side = |v: bool| {
        (0..f.len())
            .filter(|&x| f.get(x) == v)
            .map(|x| masks[x].count_ones() as usize)
            .max()
    };
    Ok((side(false), side(true)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalForms {
    /// Terms (conjunctions), one per distinct minimal 1-certificate.
    pub dnf: Vec<Vec<Literal>>,
    /// Clauses (disjunctions), one per distinct minimal 0-certificate, with
    /// every literal negated.
    pub cnf: Vec<Vec<Literal>>,
}

impl NormalForms {
    pub fn eval_dnf(&self, a: usize) -> bool {
        self.dnf.iter().any(|t| t.iter().all(|l| l.holds(a)))
    }

    pub fn eval_cnf(&self, a: usize) -> bool {
        self.cnf.iter().all(|c| c.iter().any(|l| l.holds(a)))
    }

    pub fn max_term(&self) -> usize {
        self.dnf.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_clause(&self) -> usize {
        self.cnf.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// DNF and CNF whose widths are `D_1` and `D_0`.
pub fn normal_forms(f: &TruthTable) -> Result<NormalForms> {
    let masks = min_certificate_masks(f)?;
    let mut dnf: Vec<Vec<Literal>> = Vec::new();
    let mut cnf: Vec<Vec<Literal>> = Vec::new();
    for x in 0..f.len() {
        if f.get(x) {
            let t = literals(masks[x], x, false);
            if !dnf.contains(&t) {
                dnf.push(t);
            }
        } else {
            let c = literals(masks[x], x, true);
            if !cnf.contains(&c) {
                cnf.push(c);
            }
        }
    }
    Ok(NormalForms { dnf, cnf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn table(s: &str) -> TruthTable {
        parse(s).unwrap().to_truth_table().unwrap()
    }

    /// Oracle: a subset `S` certifies `x` iff every `y` agreeing with `x` on
    /// `S` has the same value; scan all subsets.
    fn brute_cert(f: &TruthTable, x: usize) -> usize {
        let n = f.n();
        (0..1usize << n)
            .filter(|&s| (0..f.len()).all(|y| (y ^ x) & s != 0 || f.get(y) == f.get(x)))
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn subsets_lexicographic() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |m| {
            seen.push(m);
            false
        });
        assert_eq!(seen, vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        let mut all = 0;
        for_each_subset(3, 0, |_| {
            all += 1;
            false
        });
        assert_eq!(all, 1);
    }

    #[test]
    fn examples() {
        let and3 = TruthTable::and_all(3).unwrap();
        let c1 = certificate_complexity(&and3, true).unwrap();
        assert_eq!(c1.size, 3);
        let c0 = certificate_complexity(&and3, false).unwrap();
        assert_eq!(c0.size, 1);
        let f = table("(x1|x2)&(x3|x4)");
        assert_eq!(certificate_pair(&f).unwrap(), (Some(2), Some(2)));
        let p = TruthTable::parity(3).unwrap();
        let c = certificate_complexity(&p, true).unwrap();
        assert_eq!(c.size, 3);
        assert_eq!(c.witnesses.len(), 4);
        assert!(matches!(
            certificate_complexity(&TruthTable::constant(2, true).unwrap(), false),
            Err(Error::ValueNotAttained(0))
        ));
    }

    #[test]
    fn certificate_is_valid_and_minimal() {
        for seed in 0..150 {
            let n = 1 + (seed as usize % 4);
            let f = crate::testutil::random_table(n, 77 + seed);
            let masks = min_certificate_masks(&f).unwrap();
            for x in 0..f.len() {
                assert_eq!(masks[x].count_ones() as usize, brute_cert(&f, x));
                let s = masks[x];
                assert!((0..f.len()).all(|y| (y ^ x) & s != 0 || f.get(y) == f.get(x)));
            }
        }
    }

    #[test]
    fn normal_forms_represent_f() {
        for seed in 0..150 {
            let n = 1 + (seed as usize % 5);
            let f = crate::testutil::random_table(n, 300 + seed);
            let nf = normal_forms(&f).unwrap();
            for a in 0..f.len() {
                assert_eq!(nf.eval_dnf(a), f.get(a));
                assert_eq!(nf.eval_cnf(a), f.get(a));
            }
            let (d0, d1) = certificate_pair(&f).unwrap();
            assert_eq!(nf.max_term(), d1.unwrap_or(0));
            assert_eq!(nf.max_clause(), d0.unwrap_or(0));
        }
    }
}
