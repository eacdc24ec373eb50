//! Tube hypersurfaces `z3 + conj(z3) = rho(z1 + conj(z1), z2 + conj(z2))`.
//!
//! Everything is computed from one real jet of `rho` in `(t1, t2)`: the
//! function `S = (rho_12/rho_11)_1` and its partials, the invariants `J` and
//! `W`, the homogeneous Monge-Ampere residual and the Monge residual in the
//! first variable.

use crate::expr::{DomainKind, EvalDomain, ExprAst};
use crate::invariants::{
    assemble_j, classify, monge_terms, quantity, Flags, InvariantError, JInputs, Label,
    Predicates, Quantity, Residual, Result, TolProfile,
};
use crate::jet::{Jet, ScalarKind, C64};

/// Partial derivatives of `rho` at the point; `rho_k1` are pure `t1`
/// derivatives of order 3, 4 and 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoPartials {
    pub rho: f64,
    pub rho_1: f64,
    pub rho_2: f64,
    pub rho_11: f64,
    pub rho_12: f64,
    pub rho_22: f64,
    pub rho_111: f64,
    pub rho_1111: f64,
    pub rho_11111: f64,
}

/// `S` and the partials that enter `J` and `W`. `s111` is absent for
/// order-5 evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SChain<T> {
    pub s: T,
    pub s1: T,
    pub s2: T,
    pub s11: T,
    pub s12: T,
    pub s111: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub point: [f64; 2],
    pub order: usize,
    pub tol: TolProfile,
    pub rho: RhoPartials,
    /// `rho_12 / rho_11`.
    pub slope: f64,
    pub s_chain: SChain<f64>,
    /// Absent when the point is 2-degenerate.
    pub j: Option<Quantity<f64>>,
    pub w: Option<Quantity<f64>>,
    pub residual_ma: Residual,
    pub residual_monge: Residual,
    pub predicates: Predicates,
    pub flags: Flags,
}

impl InvariantReport {
    /// Predicates re-derived from the stored numbers and tolerances.
    pub fn derive_predicates(&self) -> Predicates {
        let two_nondegenerate = self.s_chain.s.abs() > self.tol.degeneracy;
        let levi_rank1 = self.residual_ma.scaled <= self.tol.rank;
        let small = |q: Option<Quantity<f64>>| q.is_some_and(|q| q.scaled < self.tol.flat);
        Predicates {
            hessian_positive: self.rho.rho_11 > 0.0,
            two_nondegenerate,
            levi_rank1,
            flat: two_nondegenerate && levi_rank1 && small(self.j) && small(self.w),
        }
    }
}

fn re(z: C64) -> f64 {
    z.re
}

/// Invariants of the tube with graphing function `rho` at `(t1, t2)`.
pub fn tube_invariants(
    rho: &ExprAst,
    t1: f64,
    t2: f64,
    order: usize,
    tol: &TolProfile,
) -> Result<InvariantReport> {
    if rho.domain() != DomainKind::Tube {
        return Err(crate::expr::ExprError::DomainMismatch {
            expected: DomainKind::Tube,
            got: rho.domain(),
        }
        .into());
    }
    let jet = rho.eval_jet(&EvalDomain::tube(t1, t2), order)?;
    tube_invariants_from_jet(&jet, tol)
}

/// Invariants from a real jet of `rho` in `(t1, t2)` of order at least 5.
pub fn tube_invariants_from_jet(jet: &Jet, tol: &TolProfile) -> Result<InvariantReport> {
    if jet.nvars() != 2 || jet.kind() != ScalarKind::Real {
        return Err(InvariantError::WrongArity {
            expected: 2,
            got: jet.nvars(),
        });
    }
    let order = jet.order();
    if order < 5 {
        return Err(InvariantError::OrderTooLow(order));
    }
    let d = |p: &[usize]| jet.d(p).map(re);
    let rho = RhoPartials {
        rho: re(jet.value()),
        rho_1: d(&[1, 0])?,
        rho_2: d(&[0, 1])?,
        rho_11: d(&[2, 0])?,
        rho_12: d(&[1, 1])?,
        rho_22: d(&[0, 2])?,
        rho_111: d(&[3, 0])?,
        rho_1111: d(&[4, 0])?,
        rho_11111: d(&[5, 0])?,
    };
    if rho.rho_11.abs() <= tol.hessian {
        return Err(InvariantError::HessianDegenerate(rho.rho_11));
    }

    let r11 = jet.diff_many(&[0, 0])?;
    let r12 = jet.diff_many(&[0, 1])?;
    let slope_jet = r12.div(&r11)?;
    let s = slope_jet.diff(0)?;
    let s1 = s.diff(0)?;
    let s11 = s1.diff(0)?;
    let chain = SChain {
        s: re(s.value()),
        s1: re(s1.value()),
        s2: re(s.diff(1)?.value()),
        s11: re(s11.value()),
        s12: re(s1.diff(1)?.value()),
        s111: if order >= 6 {
            Some(re(s11.diff(0)?.value()))
        } else {
            None
        },
    };
    let r111 = r11.diff(0)?;
    let ratio = r111.div(&r11.truncate(r111.order())?)?;
    let ratio1 = ratio.diff(0)?;
    let ratio11 = ratio1.diff(0)?;

    let residual_ma = Residual::from_real_terms(&[
        rho.rho_11 * rho.rho_22,
        -rho.rho_12 * rho.rho_12,
    ]);
    let c = |x: f64| C64::new(x, 0.0);
    let residual_monge = Residual::from_terms(&monge_terms(
        c(rho.rho_11),
        c(rho.rho_111),
        c(rho.rho_1111),
        c(rho.rho_11111),
    ));
    let slope = re(slope_jet.value());

    let mut flags = Flags::default();
    let two_nondegenerate = chain.s.abs() > tol.degeneracy;
    let (j, w) = if two_nondegenerate {
        let out = assemble_j(
            &JInputs {
                s: c(chain.s),
                s1: c(chain.s1),
                s11: c(chain.s11),
                s111: chain.s111.map(c),
                ratio: ratio.value(),
                ratio1: ratio1.value(),
                ratio11: ratio11.value(),
            },
            tol.sing,
        )?;
        flags.j_reduced_formula_used = out.reduced;
        flags.s111_term_disabled = out.s111_disabled;
        (Some(out.value.real_part()), Some(tube_w(slope, &chain)))
    } else {
        (None, None)
    };

    let mut report = InvariantReport {
        point: [re(jet.point()[0]), re(jet.point()[1])],
        order,
        tol: *tol,
        rho,
        slope,
        s_chain: chain,
        j,
        w,
        residual_ma,
        residual_monge,
        predicates: Predicates::default(),
        flags,
    };
    report.predicates = report.derive_predicates();
    Ok(report)
}

fn tube_w(slope: f64, ch: &SChain<f64>) -> Quantity<f64> {
    let (s, s1) = (ch.s, ch.s1);
    let terms = [
        4.0 * s1 / (3.0 * s),
        s1 * slope * s1 / (3.0 * s.powi(3)),
        -s1 * ch.s2 / (3.0 * s.powi(3)),
        -slope * ch.s11 / (3.0 * s * s),
        ch.s12 / (3.0 * s * s),
    ]
    .map(|t| C64::new(t, 0.0));
    quantity(&terms).real_part()
}

/// Classification label; predicates are re-derived from the report's numbers.
pub fn tube_classify(report: &InvariantReport) -> Label {
    classify(&report.derive_predicates(), &report.flags)
}
