//! Rigid hypersurfaces `Re z3 = F(z1, conj z1, z2, conj z2)`.
//!
//! Jets are taken in the four Wirtinger variables `(z1, z1b, z2, z2b)` at a
//! conjugate-paired point; index 0..4 in that order.

use crate::expr::{BinOp, DomainKind, EvalDomain, ExprAst};
use crate::invariants::{
    assemble_j, classify, monge_terms, quantity, Flags, InvariantError, JInputs, Label,
    Predicates, Quantity, Residual, Result, TolProfile,
};
use crate::jet::{Jet, C64};
use crate::tube::SChain;

const Z1: usize = 0;
const Z1B: usize = 1;
const Z2: usize = 2;
const Z2B: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidPoint {
    pub z1: C64,
    pub z2: C64,
}

impl RigidPoint {
    pub fn new(z1: C64, z2: C64) -> Self {
        Self { z1, z2 }
    }

    pub fn domain(&self) -> EvalDomain {
        EvalDomain::rigid(self.z1, self.z2)
    }
}

/// Second and higher Wirtinger partials of `F` after sign normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPartials {
    pub f_11b: f64,
    pub f_12b: C64,
    pub f_21b: C64,
    pub f_22b: f64,
    pub f_111b: C64,
    pub f_1111b: C64,
    pub f_11111b: C64,
}

/// Derivatives of the conjugate function `conj(S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SBarChain {
    pub sbar: C64,
    pub sbar_1: C64,
    pub sbar_1b: C64,
    pub sbar_2: C64,
    pub sbar_11b: C64,
    pub sbar_21b: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidReport {
    pub point: RigidPoint,
    pub order: usize,
    pub tol: TolProfile,
    pub partials: FPartials,
    /// `F_{1 2b} / F_{1 1b}`.
    pub slope: C64,
    pub s_chain: SChain<C64>,
    pub s1bar: C64,
    pub sbar_chain: SBarChain,
    pub j: Option<Quantity<C64>>,
    pub w: Option<Quantity<C64>>,
    pub residual_cma: Residual,
    pub residual_cmonge: Residual,
    /// `max(|S_1|, |S_1b|)`.
    pub residual_s1111: f64,
    pub residual_polystruct: f64,
    pub residual_reality: f64,
    pub predicates: Predicates,
    pub flags: Flags,
}

impl RigidReport {
    pub fn derive_predicates(&self) -> Predicates {
        let two_nondegenerate = self.s_chain.s.norm() > self.tol.degeneracy;
        let levi_rank1 = self.residual_cma.scaled <= self.tol.rank;
        let small = |q: Option<Quantity<C64>>| q.is_some_and(|q| q.scaled < self.tol.flat);
        Predicates {
            hessian_positive: self.partials.f_11b > 0.0,
            two_nondegenerate,
            levi_rank1,
            flat: two_nondegenerate && levi_rank1 && small(self.j) && small(self.w),
        }
    }
}

pub fn rigid_classify(report: &RigidReport) -> Label {
    classify(&report.derive_predicates(), &report.flags)
}

fn check_rigid(f: &ExprAst) -> Result<()> {
    if f.domain() != DomainKind::Rigid {
        return Err(crate::expr::ExprError::DomainMismatch {
            expected: DomainKind::Rigid,
            got: f.domain(),
        }
        .into());
    }
    Ok(())
}

/// Invariants of the rigid hypersurface with graphing function `f`.
pub fn rigid_invariants(
    f: &ExprAst,
    point: RigidPoint,
    order: usize,
    tol: &TolProfile,
) -> Result<RigidReport> {
    check_rigid(f)?;
    let jet = f.eval_jet(&point.domain(), order)?;
    rigid_invariants_from_jet(&jet, tol)
}

/// Applies the reality check and the `F_{1 1b} > 0` normalization.
fn normalize(jet: &Jet, tol: &TolProfile) -> Result<(Jet, bool, f64)> {
    if jet.nvars() != 4 {
        return Err(InvariantError::WrongArity {
            expected: 4,
            got: jet.nvars(),
        });
    }
    if jet.order() < 5 {
        return Err(InvariantError::OrderTooLow(jet.order()));
    }
    let imag = jet.value().im.abs();
    if imag > tol.reality {
        return Err(InvariantError::RealityViolated(imag));
    }
    let f11b = jet.d(&[1, 1, 0, 0])?.re;
    if f11b.abs() <= tol.hessian {
        return Err(InvariantError::HessianDegenerate(f11b));
    }
    Ok(if f11b < 0.0 {
        (jet.neg(), true, imag)
    } else {
        (jet.clone(), false, imag)
    })
}

pub fn rigid_invariants_from_jet(raw: &Jet, tol: &TolProfile) -> Result<RigidReport> {
    let (jet, flipped, imag) = normalize(raw, tol)?;
    let order = jet.order();
    let d = |p: &[usize]| jet.d(p);
    let partials = FPartials {
        f_11b: d(&[1, 1, 0, 0])?.re,
        f_12b: d(&[1, 0, 0, 1])?,
        f_21b: d(&[0, 1, 1, 0])?,
        f_22b: d(&[0, 0, 1, 1])?.re,
        f_111b: d(&[2, 1, 0, 0])?,
        f_1111b: d(&[3, 1, 0, 0])?,
        f_11111b: d(&[4, 1, 0, 0])?,
    };

    let p = jet.diff_many(&[Z1, Z1B])?;
    let slope_jet = jet.diff_many(&[Z1, Z2B])?.div(&p)?;
    let s = slope_jet.diff(Z1)?;
    let s1 = s.diff(Z1)?;
    let s11 = s1.diff(Z1)?;
    let s_chain = SChain {
        s: s.value(),
        s1: s1.value(),
        s2: s.diff(Z2)?.value(),
        s11: s11.value(),
        s12: s1.diff(Z2)?.value(),
        s111: if order >= 6 {
            Some(s11.diff(Z1)?.value())
        } else {
            None
        },
    };
    let s1bar = s.diff(Z1B)?.value();

    let sbar = s.conj_jet()?;
    let sbar_1b = sbar.diff(Z1B)?;
    let sbar_chain = SBarChain {
        sbar: sbar.value(),
        sbar_1: sbar.diff(Z1)?.value(),
        sbar_1b: sbar_1b.value(),
        sbar_2: sbar.diff(Z2)?.value(),
        sbar_11b: sbar_1b.diff(Z1)?.value(),
        sbar_21b: sbar_1b.diff(Z2)?.value(),
    };

    let p1 = p.diff(Z1)?;
    let ratio = p1.div(&p.truncate(p1.order())?)?;
    let ratio1 = ratio.diff(Z1)?;
    let ratio11 = ratio1.diff(Z1)?;

    let residual_cma = Residual::from_terms(&[
        C64::new(partials.f_11b * partials.f_22b, 0.0),
        -partials.f_12b * partials.f_12b.conj(),
    ]);
    let residual_cmonge = Residual::from_terms(&monge_terms(
        C64::new(partials.f_11b, 0.0),
        partials.f_111b,
        partials.f_1111b,
        partials.f_11111b,
    ));
    let residual_polystruct = polystruct_from_levi(&p)?;

    let mut flags = Flags {
        sign_flip_applied: flipped,
        ..Flags::default()
    };
    let two_nondegenerate = s_chain.s.norm() > tol.degeneracy;
    let (j, w) = if two_nondegenerate {
        let out = assemble_j(
            &JInputs {
                s: s_chain.s,
                s1: s_chain.s1,
                s11: s_chain.s11,
                s111: s_chain.s111,
                ratio: ratio.value(),
                ratio1: ratio1.value(),
                ratio11: ratio11.value(),
            },
            tol.sing,
        )?;
        flags.j_reduced_formula_used = out.reduced;
        flags.s111_term_disabled = out.s111_disabled;
        let slope_bar = partials.f_21b / partials.f_11b;
        (Some(out.value), Some(rigid_w(slope_bar, &s_chain, &sbar_chain)))
    } else {
        (None, None)
    };

    let pt = jet.point();
    let mut report = RigidReport {
        point: RigidPoint::new(pt[0], pt[2]),
        order,
        tol: *tol,
        partials,
        slope: slope_jet.value(),
        s_chain,
        s1bar,
        sbar_chain,
        j,
        w,
        residual_cma,
        residual_cmonge,
        residual_s1111: s_chain.s1.norm().max(s1bar.norm()),
        residual_polystruct,
        residual_reality: imag,
        predicates: Predicates::default(),
        flags,
    };
    report.predicates = report.derive_predicates();
    Ok(report)
}

/// `slope_bar` is `F_{2 1b} / F_{1 1b}`.
fn rigid_w(slope_bar: C64, s: &SChain<C64>, b: &SBarChain) -> Quantity<C64> {
    let sb = b.sbar;
    let terms = [
        2.0 * b.sbar_1 / (3.0 * sb),
        2.0 * s.s1 / (3.0 * s.s),
        b.sbar_1b * slope_bar * b.sbar_1 / (3.0 * sb * sb * sb),
        -b.sbar_1b * b.sbar_2 / (3.0 * sb * sb * sb),
        -slope_bar * b.sbar_11b / (3.0 * sb * sb),
        b.sbar_21b / (3.0 * sb * sb),
    ];
    quantity(&terms)
}

fn polystruct_from_levi(levi: &Jet) -> Result<f64> {
    Ok(levi.powf(-2.0 / 3.0)?.d(&[3, 0, 0, 0])?.norm())
}

/// `|d^3/dz1^3 (F_{1 1b})^(-2/3)|` at the point, after sign normalization.
/// It vanishes exactly where `F` solves the complex Monge equation.
pub fn polystruct_residual(
    f: &ExprAst,
    point: RigidPoint,
    order: usize,
    tol: &TolProfile,
) -> Result<f64> {
    check_rigid(f)?;
    let raw = f.eval_jet(&point.domain(), order)?;
    let (jet, _, _) = normalize(&raw, tol)?;
    polystruct_from_levi(&jet.diff_many(&[Z1, Z1B])?)
}

/// `F = r |z1|^2 + (t + u) z1^2 + conj(t + u) conj(z1)^2`, where `r`, `t`
/// depend on `(z2, z2b)` and the gauge `u` on `z2` only.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFormProfile {
    pub r: ExprAst,
    pub t: ExprAst,
    pub u: Option<ExprAst>,
}

impl SpecFormProfile {
    pub fn new(r: ExprAst, t: ExprAst, u: Option<ExprAst>) -> Result<Self> {
        let only = |e: &ExprAst, allowed: &[&str], what: &'static str, desc: &'static str| {
            check_rigid(e)?;
            if e.free_variables().iter().all(|v| allowed.contains(v)) {
                Ok(())
            } else {
                Err(InvariantError::ProfileVariables(what, desc))
            }
        };
        only(&r, &["z2", "z2b"], "r", "z2, z2b")?;
        only(&t, &["z2", "z2b"], "t", "z2, z2b")?;
        if let Some(u) = &u {
            only(u, &["z2"], "u", "z2")?;
        }
        Ok(Self { r, t, u })
    }

    pub fn parse(r: &str, t: &str, u: Option<&str>) -> Result<Self> {
        let p = |s: &str| ExprAst::parse(s, DomainKind::Rigid);
        Self::new(p(r)?, p(t)?, u.map(p).transpose()?)
    }

    /// The assembled graphing function.
    pub fn graphing_function(&self) -> Result<ExprAst> {
        let p = |s: &str| ExprAst::parse(s, DomainKind::Rigid);
        let tu = match &self.u {
            Some(u) => self.t.combine(BinOp::Add, u)?,
            None => self.t.clone(),
        };
        let f = self
            .r
            .combine(BinOp::Mul, &p("z1*z1b")?)?
            .combine(BinOp::Add, &tu.combine(BinOp::Mul, &p("z1^2")?)?)?
            .combine(BinOp::Add, &tu.conjugate().combine(BinOp::Mul, &p("z1b^2")?)?)?;
        Ok(f)
    }
}

/// Residuals of the special-form system at one `z2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFormResiduals {
    pub r: f64,
    /// `r r_{2 2b} - |r_2|^2 - 4 |t_{2b}|^2`
    pub main1: Residual,
    /// `r t_{2 2b} - 2 r_2 t_{2b}`
    pub main2: Residual,
    /// `t_{2b} - r^2 / 2`
    pub reltr: Residual,
    /// `r r_{2 2b} - |r_2|^2 - r^4`
    pub newshortsys: Residual,
    /// `4 f_{2 2b} - 4 e^{2f}` with `f = ln r`
    pub laplace: Residual,
    pub t_2b: C64,
    pub graphing_function: ExprAst,
}

pub fn specform_residuals(
    profile: &SpecFormProfile,
    z2: C64,
    tol: &TolProfile,
) -> Result<SpecFormResiduals> {
    let dom = EvalDomain::rigid(C64::new(0.0, 0.0), z2);
    let r = profile.r.eval_jet(&dom, 2)?;
    let t = profile.t.eval_jet(&dom, 2)?;
    let rv = r.value();
    if rv.im.abs() > tol.reality {
        return Err(InvariantError::RealityViolated(rv.im.abs()));
    }
    let rv = rv.re;
    if rv <= 0.0 {
        return Err(InvariantError::NonPositiveR(rv));
    }
    let c = |x: f64| C64::new(x, 0.0);
    let r2 = r.d(&[0, 0, 1, 0])?;
    let r22b = r.d(&[0, 0, 1, 1])?;
    let t2b = t.d(&[0, 0, 0, 1])?;
    let t22b = t.d(&[0, 0, 1, 1])?;
    let r2sq = c(r2.norm_sqr());
    let f22b = r.ln()?.d(&[0, 0, 1, 1])?;

    Ok(SpecFormResiduals {
        r: rv,
        main1: Residual::from_terms(&[rv * r22b, -r2sq, c(-4.0 * t2b.norm_sqr())]),
        main2: Residual::from_terms(&[rv * t22b, -2.0 * r2 * t2b]),
        reltr: Residual::from_terms(&[t2b, c(-rv * rv / 2.0)]),
        newshortsys: Residual::from_terms(&[rv * r22b, -r2sq, c(-rv.powi(4))]),
        laplace: Residual::from_terms(&[4.0 * f22b, c(-4.0 * rv * rv)]),
        t_2b: t2b,
        graphing_function: profile.graphing_function()?,
    })
}
