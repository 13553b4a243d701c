//! The ℓ⁰/ℓ¹ lower-bound recursion for read-once ∧/∨ formulas and the
//! contraction step it comes from.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::rational::{one, Q};

/// `ℓ⁰` and `ℓ¹`: lower bounds on the randomized cost of certifying the
/// values 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundPair {
    #[serde(with = "crate::rational::serde_q")]
    pub l0: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub l1: Q,
}

impl BoundPair {
    pub fn max(&self) -> &Q {
        if self.l0 >= self.l1 {
            &self.l0
        } else {
            &self.l1
        }
    }

    fn swapped(self) -> BoundPair {
        BoundPair {
            l0: self.l1,
            l1: self.l0,
        }
    }
}

/// `(b₁ + b₂, min{a₁ + b₂, b₁ + a₂, (b₁a₁ + a₂b₂ + b₁b₂)/(b₁ + b₂)})`: the
/// ∧ rule with `a = ℓ⁰`, `b = ℓ¹`; ∨ is the same rule with roles swapped.
fn combine_and(g: &BoundPair, h: &BoundPair) -> BoundPair {
    let s = &g.l1 + &h.l1;
    let third = (&g.l1 * &g.l0 + &h.l0 * &h.l1 + &g.l1 * &h.l1) / &s;
    let l0 = [&g.l0 + &h.l1, &g.l1 + &h.l0, third]
        .into_iter()
        .min()
        .expect("three candidates");
    BoundPair { l0, l1: s }
}

fn bound(f: &Formula) -> Result<BoundPair> {
    match f {
        Formula::Var { .. } => Ok(BoundPair { l0: one(), l1: one() }),
        Formula::And { left, right } => Ok(combine_and(&bound(left)?, &bound(right)?)),
        Formula::Or { left, right } => {
            let (g, h) = (bound(left)?.swapped(), bound(right)?.swapped());
            Ok(combine_and(&g, &h).swapped())
        }
        Formula::Not { .. } => Err(Error::UnsupportedGate("not")),
        Formula::Nand { .. } => Err(Error::UnsupportedGate("nand")),
    }
}

pub fn sw_lower_bound(formula: &Formula) -> Result<BoundPair> {
    if !formula.is_read_once() {
        return Err(Error::NotReadOnce);
    }
    bound(formula)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    And,
    Or,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub label: String,
    #[serde(with = "crate::rational::serde_q")]
    pub lhs: Q,
    /// `None` stands for `+∞` (a zero probability in a denominator).
    #[serde(with = "crate::rational::serde_q_opt")]
    pub rhs: Option<Q>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionStep {
    pub gate: Gate,
    #[serde(with = "crate::rational::serde_q")]
    pub c0: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub c1: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub px: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub py: Q,
    pub inequalities: Vec<InequalityCheck>,
    pub all_hold: bool,
}

/// Contracts the gate over children with costs `(c₀, c₁)`. For ∧, `c′₁` is
/// the sum of the children's `c₁`, `p_x ∝ c₁(x)`, and `c′₀` is the largest
/// value meeting every inequality. ∨ is the dual with 0 and 1 exchanged.
pub fn contraction_step(cx: (Q, Q), cy: (Q, Q), gate: Gate) -> Result<ContractionStep> {
    // work in the ∧ frame: `a` is the additive side, `b` the minimized side
    let ((bx, ax), (by, ay)) = match gate {
        Gate::And => (cx, cy),
        Gate::Or => ((cx.1, cx.0), (cy.1, cy.0)),
    };
    let s = &ax + &ay;
    if s.is_zero() {
        return Err(Error::Degenerate("both children have zero cost on the summed side"));
    }
    let px = &ax / &s;
    let py = &ay / &s;
    let ratio = |num: &Q, p: &Q| (!p.is_zero()).then(|| num / p);
    let a_new = s.clone();
    let uppers_b: Vec<(String, Option<Q>)> = vec![
        ("p_y·c_a(x)/p_x + c_b(x)".into(), ratio(&ax, &px).map(|r| &py * r + &bx)),
        ("p_x·c_a(y)/p_y + c_b(y)".into(), ratio(&ay, &py).map(|r| &px * r + &by)),
        ("p_y(c_a(x)+c_b(y)) + p_x·c_b(x)".into(), Some(&py * (&ax + &by) + &px * &bx)),
        ("p_x(c_a(y)+c_b(x)) + p_y·c_b(y)".into(), Some(&px * (&ay + &bx) + &py * &by)),
    ];
    let b_new = uppers_b
        .iter()
        .filter_map(|(_, v)| v.clone())
        .min()
        .expect("the last two bounds are always finite");
    let (na, nb) = match gate {
        Gate::And => ("c'_1", "c'_0"),
        Gate::Or => ("c'_0", "c'_1"),
    };
    let mut inequalities = vec![
        InequalityCheck {
            label: format!("{na} ≤ c_a(x)/p_x"),
            rhs: ratio(&ax, &px),
            lhs: a_new.clone(),
            holds: false,
        },
        InequalityCheck {
            label: format!("{na} ≤ c_a(y)/p_y"),
            rhs: ratio(&ay, &py),
            lhs: a_new.clone(),
            holds: false,
        },
    ];
    for (label, rhs) in uppers_b {
        inequalities.push(InequalityCheck {
            label: format!("{nb} ≤ {label}"),
            lhs: b_new.clone(),
            rhs,
            holds: false,
        });
    }
    for ineq in &mut inequalities {
        ineq.holds = ineq.rhs.as_ref().is_none_or(|r| ineq.lhs <= *r);
    }
    let all_hold = inequalities.iter().all(|i| i.holds);
    let (c0, c1) = match gate {
        Gate::And => (b_new, a_new),
        Gate::Or => (a_new, b_new),
    };
    Ok(ContractionStep {
        gate,
        c0,
        c1,
        px,
        py,
        inequalities,
        all_hold,
    })
}
