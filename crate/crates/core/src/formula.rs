//! Boolean formulas: parsing, printing, evaluation, and the alternating
//! AND/OR tree with its NAND normalization.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term ('|' term)*
//! term   := factor ('&' factor)*
//! factor := '!' factor | 'nand' '(' expr ',' expr ')' | '(' expr ')' | var
//! var    := 'x' [1-9][0-9]*
//! ```
//!
//! Chains such as `x1 & x2 & x3` associate to the left.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolfn::{TruthTable, MAX_VARS};
use crate::error::{Error, Result};

/// Largest `k` accepted by [`alternating_tree`].
pub const MAX_ALTERNATING_DEPTH: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Formula {
    Var { index: usize },
    Not { child: Box<Formula> },
    And { left: Box<Formula>, right: Box<Formula> },
    Or { left: Box<Formula>, right: Box<Formula> },
    Nand { left: Box<Formula>, right: Box<Formula> },
}

impl Formula {
    pub fn var(index: usize) -> Formula {
        Formula::Var { index }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: Formula) -> Formula {
        Formula::Not {
            child: Box::new(child),
        }
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::Or {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn nand(left: Formula, right: Formula) -> Formula {
        Formula::Nand {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var { .. } => vec![],
            Formula::Not { child } => vec![child],
            Formula::And { left, right }
            | Formula::Or { left, right }
            | Formula::Nand { left, right } => vec![left, right],
        }
    }

    pub fn max_var(&self) -> usize {
        match self {
            Formula::Var { index } => *index,
            _ => self.children().iter().map(|c| c.max_var()).max().unwrap_or(0),
        }
    }

    /// Variable occurrences, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Formula::Var { index } => out.push(*index),
            _ => {
                for c in self.children() {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        match self {
            Formula::Var { index } => x[index - 1],
            Formula::Not { child } => !child.eval(x),
            Formula::And { left, right } => left.eval(x) && right.eval(x),
            Formula::Or { left, right } => left.eval(x) || right.eval(x),
            Formula::Nand { left, right } => !(left.eval(x) && right.eval(x)),
        }
    }

    /// Table on `n = max variable index` variables; indices below the max
    /// that never occur are dummy variables.
    pub fn to_truth_table(&self) -> Result<TruthTable> {
        let n = self.max_var();
        if n > MAX_VARS {
            return Err(Error::VariableCount { n, max: MAX_VARS });
        }
        self.table_on(n)
    }

    /// Table on `n ≥ max_var()` variables.
    pub fn table_on(&self, n: usize) -> Result<TruthTable> {
        match self {
            Formula::Var { index } => TruthTable::var(n, *index),
            Formula::Not { child } => Ok(child.table_on(n)?.not()),
            Formula::And { left, right } => left.table_on(n)?.and(&right.table_on(n)?),
            Formula::Or { left, right } => left.table_on(n)?.or(&right.table_on(n)?),
            Formula::Nand { left, right } => Ok(left.table_on(n)?.and(&right.table_on(n)?)?.not()),
        }
    }

    /// Each of `x_1..x_max` occurs exactly once.
    pub fn is_read_once(&self) -> bool {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        leaves.iter().enumerate().all(|(k, &v)| v == k + 1)
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Swaps every AND with OR.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Var { .. } => self.clone(),
            Formula::Not { child } => Formula::not(child.dual()),
            Formula::And { left, right } => Formula::or(left.dual(), right.dual()),
            Formula::Or { left, right } => Formula::and(left.dual(), right.dual()),
            Formula::Nand { left, right } => Formula::nand(left.dual(), right.dual()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(x: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match x {
                Formula::And { .. } | Formula::Or { .. } => write!(f, "({x})"),
                _ => write!(f, "{x}"),
            }
        }
        match self {
            Formula::Var { index } => write!(f, "x{index}"),
            Formula::Not { child } => {
                write!(f, "!")?;
                atom(child, f)
            }
            Formula::And { left, right } => {
                atom(left, f)?;
                write!(f, " & ")?;
                atom(right, f)
            }
            Formula::Or { left, right } => {
                atom(left, f)?;
                write!(f, " | ")?;
                atom(right, f)
            }
            Formula::Nand { left, right } => write!(f, "nand({left}, {right})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Formula> {
        let mut lhs = self.term()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Formula> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::not(self.factor()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'n') if self.src[self.pos..].starts_with(b"nand") => {
                self.pos += 4;
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(Formula::nand(a, b))
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = &self.src[digits_start..self.pos];
                if digits.is_empty() {
                    return self.err("expected variable index after 'x'");
                }
                if digits[0] == b'0' {
                    self.pos = start;
                    return self.err("variable index must start with 1-9");
                }
                let text = std::str::from_utf8(digits).expect("ascii digits");
                match text.parse::<usize>() {
                    Ok(index) => Ok(Formula::var(index)),
                    Err(_) => {
                        self.pos = start;
                        self.err("variable index too large")
                    }
                }
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// The complete alternating tree `f_k` on `2^k` variables: `f_0 = x_1`, and
/// `f_{j+1}` joins two copies of `f_j` with AND when `j` is odd and OR when
/// `j` is even.
pub fn alternating_tree(k: usize) -> Result<Formula> {
    if k > MAX_ALTERNATING_DEPTH {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as i64,
            range: "0..=20",
        });
    }
    fn build(level: usize, offset: usize) -> Formula {
        if level == 0 {
            return Formula::var(offset + 1);
        }
        let half = 1usize << (level - 1);
        let l = build(level - 1, offset);
        let r = build(level - 1, offset + half);
        if (level - 1) % 2 == 1 {
            Formula::and(l, r)
        } else {
            Formula::or(l, r)
        }
    }
    Ok(build(k, 0))
}

/// The pure NAND tree of depth `k` on `2^k` variables.
pub fn nand_tree(k: usize) -> Result<Formula> {
    if k > MAX_ALTERNATING_DEPTH {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as i64,
            range: "0..=20",
        });
    }
    fn build(level: usize, offset: usize) -> Formula {
        if level == 0 {
            return Formula::var(offset + 1);
        }
        let half = 1usize << (level - 1);
        Formula::nand(build(level - 1, offset), build(level - 1, offset + half))
    }
    Ok(build(k, 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NandForm {
    pub formula: Formula,
    /// The NAND tree computes the complement of the input formula.
    pub complemented: bool,
}

/// Rewrites a complete alternating AND/OR tree into NAND gates.
///
/// `a ∨ b = nand(¬a, ¬b)` and `¬(a ∧ b) = nand(a, b)`; alternation means
/// every negation cancels except at the leaves (kept as `Not(Var)`) and,
/// when the root is an AND, at the root, which is reported through
/// `complemented`.
pub fn nand_normalize(formula: &Formula) -> Result<NandForm> {
    check_complete_and_or(formula)?;
    fn positive(f: &Formula) -> Result<Formula> {
        match f {
            Formula::Var { .. } => Ok(f.clone()),
            Formula::Or { left, right } => Ok(Formula::nand(negative(left)?, negative(right)?)),
            _ => Err(Error::NotAlternating),
        }
    }
    fn negative(f: &Formula) -> Result<Formula> {
        match f {
            Formula::Var { .. } => Ok(Formula::not(f.clone())),
            Formula::And { left, right } => Ok(Formula::nand(positive(left)?, positive(right)?)),
            _ => Err(Error::NotAlternating),
        }
    }
    match formula {
        Formula::And { .. } => Ok(NandForm {
            formula: negative(formula)?,
            complemented: true,
        }),
        _ => Ok(NandForm {
            formula: positive(formula)?,
            complemented: false,
        }),
    }
}

fn check_complete_and_or(f: &Formula) -> Result<usize> {
    match f {
        Formula::Var { .. } => Ok(0),
        Formula::And { left, right } | Formula::Or { left, right } => {
            let dl = check_complete_and_or(left)?;
            let dr = check_complete_and_or(right)?;
            if dl != dr {
                return Err(Error::NotAlternating);
            }
            Ok(dl + 1)
        }
        Formula::Nand { .. } => Err(Error::UnsupportedGate("nand (already normalized)")),
        Formula::Not { .. } => Err(Error::UnsupportedGate("not")),
    }
}
