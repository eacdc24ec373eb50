//! Pieces shared by the tube and rigid evaluators: tolerances, residual
//! scaling, the `J` assembly with its singular-term policy, and labels.

use std::fmt;

use thiserror::Error;

use crate::expr::ExprError;
use crate::jet::{JetError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error("Levi form entry vanishes at the point ({0:e})")]
    HessianDegenerate(f64),
    #[error("J is singular: S1 = {s1:e} but S111 = {s111:e}")]
    JSingular { s1: f64, s111: f64 },
    #[error("graphing function is not real-valued at the point (imaginary part {0:e})")]
    RealityViolated(f64),
    #[error("invariants need a jet of order >= 5, got {0}")]
    OrderTooLow(usize),
    #[error("expected a jet in {expected} variables, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("r must be positive, got {0}")]
    NonPositiveR(f64),
    #[error("{0} may only depend on {1}")]
    ProfileVariables(&'static str, &'static str),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T> = std::result::Result<T, InvariantError>;

/// Tolerances used by the predicates; every field is overridable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolProfile {
    /// Scaled `|J|`, `|W|` below this count as zero.
    pub flat: f64,
    /// Threshold for `S1` and `S111` in the `J` singular-term policy.
    pub sing: f64,
    /// `|S|` at or below this means 2-degenerate.
    pub degeneracy: f64,
    /// Scaled Monge-Ampere residual above this means not rank 1.
    pub rank: f64,
    /// `|rho_11|` or `|F_{1 1b}|` at or below this is degenerate.
    pub hessian: f64,
    /// Largest tolerated imaginary part of a rigid graphing function.
    pub reality: f64,
}

impl Default for TolProfile {
    fn default() -> Self {
        Self {
            flat: 1e-8,
            sing: 1e-10,
            degeneracy: 1e-10,
            rank: 1e-8,
            hessian: 1e-10,
            reality: 1e-9,
        }
    }
}

/// A residual `|sum of terms|`, raw and divided by `1 + sum |term|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub raw: f64,
    pub scaled: f64,
}

impl Residual {
    pub fn from_terms(terms: &[C64]) -> Self {
        let sum: C64 = terms.iter().sum();
        let mass: f64 = terms.iter().map(|t| t.norm()).sum();
        let raw = sum.norm();
        Self {
            raw,
            scaled: raw / (1.0 + mass),
        }
    }

    pub fn from_real_terms(terms: &[f64]) -> Self {
        let terms: Vec<C64> = terms.iter().map(|&t| C64::new(t, 0.0)).collect();
        Self::from_terms(&terms)
    }
}

/// The value of an invariant together with its scaled magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity<T> {
    pub value: T,
    pub scaled: f64,
}

impl Quantity<C64> {
    fn from_terms(terms: &[C64]) -> Self {
        Self {
            value: terms.iter().sum(),
            scaled: Residual::from_terms(terms).scaled,
        }
    }

    pub(crate) fn real_part(self) -> Quantity<f64> {
        Quantity {
            value: self.value.re,
            scaled: self.scaled,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Predicates {
    pub hessian_positive: bool,
    pub two_nondegenerate: bool,
    pub levi_rank1: bool,
    pub flat: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub j_reduced_formula_used: bool,
    /// Order-5 evaluation: the `S111/S1` term of `J` could not be formed.
    pub s111_term_disabled: bool,
    pub sign_flip_applied: bool,
    pub guard_skipped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Flat,
    Nonflat,
    TwoDegenerate,
    NotRank1,
    OutOfDomain,
}

impl Label {
    pub const ALL: [Label; 5] = [
        Label::Flat,
        Label::Nonflat,
        Label::TwoDegenerate,
        Label::NotRank1,
        Label::OutOfDomain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Flat => "flat",
            Label::Nonflat => "nonflat",
            Label::TwoDegenerate => "two_degenerate",
            Label::NotRank1 => "not_rank1",
            Label::OutOfDomain => "out_of_domain",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Label from predicates and flags; total over every report.
pub fn classify(predicates: &Predicates, flags: &Flags) -> Label {
    if flags.guard_skipped {
        Label::OutOfDomain
    } else if !predicates.two_nondegenerate {
        Label::TwoDegenerate
    } else if !predicates.levi_rank1 {
        Label::NotRank1
    } else if predicates.flat {
        Label::Flat
    } else {
        Label::Nonflat
    }
}

/// Values entering `J`. `ratio` is `rho_111/rho_11` (tube) or
/// `F_{11 1b}/F_{1 1b}` (rigid), with its first two derivatives in the first
/// variable.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JInputs {
    pub s: C64,
    pub s1: C64,
    pub s11: C64,
    pub s111: Option<C64>,
    pub ratio: C64,
    pub ratio1: C64,
    pub ratio11: C64,
}

pub(crate) struct JOutcome {
    pub value: Quantity<C64>,
    pub reduced: bool,
    pub s111_disabled: bool,
}

/// The three terms that survive when `S1 = S11 = S111 = 0`.
pub(crate) fn reduced_j_terms(ratio: C64, ratio1: C64, ratio11: C64) -> Vec<C64> {
    vec![
        ratio * ratio1 / 3.0,
        -2.0 / 27.0 * ratio * ratio * ratio,
        -ratio11 / 6.0,
    ]
}

/// Assembles `J` term by term.
///
/// The `S111/S1` term is 0/0 where `S1` vanishes identically: if both
/// `|S1|` and `|S111|` are within `sing_tol` the reduced formula is used,
/// if only `|S1|` is, the point is `JSingular`.
pub(crate) fn assemble_j(inp: &JInputs, sing_tol: f64) -> Result<JOutcome> {
    let JInputs {
        s,
        s1,
        s11,
        s111,
        ratio: b,
        ratio1: b1,
        ratio11: b11,
    } = *inp;
    let s1_small = s1.norm() <= sing_tol;
    let reduced = match s111 {
        Some(t) if s1_small && t.norm() > sing_tol => {
            return Err(InvariantError::JSingular {
                s1: s1.norm(),
                s111: t.norm(),
            })
        }
        _ => s1_small,
    };
    let terms = if reduced {
        reduced_j_terms(b, b1, b11)
    } else {
        let mut t = vec![
            5.0 * s1 * s1 / (18.0 * s * s) * b,
            b * b1 / 3.0,
            -s1 / (9.0 * s) * b * b,
            20.0 * s1 * s1 * s1 / (27.0 * s * s * s),
            -5.0 * s1 * s11 / (6.0 * s * s),
            s1 / (6.0 * s) * b1,
            -s11 / (6.0 * s) * b,
            -2.0 / 27.0 * b * b * b,
            -b11 / 6.0,
        ];
        if let Some(s111) = s111 {
            t.push(s111 / s1);
        }
        t
    };
    Ok(JOutcome {
        value: Quantity::from_terms(&terms),
        reduced,
        s111_disabled: s111.is_none(),
    })
}

pub(crate) fn quantity(terms: &[C64]) -> Quantity<C64> {
    Quantity::from_terms(terms)
}

/// `9 y5 y2^2 - 45 y4 y3 y2 + 40 y3^3` as its three terms.
pub(crate) fn monge_terms(y2: C64, y3: C64, y4: C64, y5: C64) -> [C64; 3] {
    [
        9.0 * y5 * y2 * y2,
        -45.0 * y4 * y3 * y2,
        40.0 * y3 * y3 * y3,
    ]
}
