//! Solutions of the homogeneous Monge-Ampere equation from profile pairs.
//!
//! A pair `(p, q)` of functions of one variable `v` with `p(0) = q(0) = 0`,
//! `q' > 0` and `p'' != 0` determines `rho` through
//!
//! ```text
//! t1 = q(v) - w p'(v),   t2 = w,
//! rho = v q(v) - int_0^v q + w (p(v) - v p'(v)).
//! ```
//!
//! The module also evaluates the ODE systems satisfied by flat profiles and
//! the Liouville-type ODEs behind the rigid classification.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use thiserror::Error;

use crate::expr::{DomainKind, EvalDomain, ExprAst, ExprError};
use crate::invariants::{monge_terms, Residual};
use crate::jet::{Jet, JetError, MultiIndex, ScalarKind, C64};

/// Smallest admissible `q'` and `|p''|` on the sampled interval.
pub const PROFILE_MARGIN: f64 = 1e-6;
/// `|q' - w p''|` at or below this is treated as a singular Jacobian.
pub const JACOBIAN_GUARD: f64 = 1e-8;
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_STEPS: usize = 50;
pub const QUAD_NODES: usize = 32;
const QUAD_CHECK_NODES: usize = 24;
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaparError {
    #[error("profile violates {condition} at v = {at}")]
    ProfileViolation { condition: String, at: f64 },
    #[error("Newton iteration for (t1, t2) = ({t1}, {t2}) did not converge")]
    NewtonDiverged { t1: f64, t2: f64 },
    #[error("Jacobian q' - w p'' = {value:e} vanishes at v = {v}, w = {w}")]
    JacobianSingular { v: f64, w: f64, value: f64 },
    #[error("quadrature on [0, {v}] is unreliable: {reason}")]
    QuadratureUnreliable { v: f64, reason: String },
    #[error("{0}")]
    DomainGuard(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T> = std::result::Result<T, MaparError>;

#[derive(Debug, Clone, PartialEq)]
pub struct PQProfile {
    pub p: ExprAst,
    pub q: ExprAst,
    pub interval: (f64, f64),
}

impl PQProfile {
    pub const DEFAULT_INTERVAL: (f64, f64) = (-0.5, 0.5);

    pub fn new(p: ExprAst, q: ExprAst, interval: (f64, f64)) -> Result<Self> {
        for e in [&p, &q] {
            if e.domain() != DomainKind::Profile {
                return Err(ExprError::DomainMismatch {
                    expected: DomainKind::Profile,
                    got: e.domain(),
                }
                .into());
            }
        }
        Ok(Self { p, q, interval })
    }

    pub fn parse(p: &str, q: &str) -> Result<Self> {
        Self::new(
            ExprAst::parse(p, DomainKind::Profile)?,
            ExprAst::parse(q, DomainKind::Profile)?,
            Self::DEFAULT_INTERVAL,
        )
    }

    pub fn with_interval(mut self, a: f64, b: f64) -> Self {
        self.interval = (a, b);
        self
    }

    /// Taylor coefficients of `p` (or `q`) at `v` up to `order`.
    fn series(expr: &ExprAst, v: f64, order: usize) -> Result<Vec<f64>> {
        let jet = expr.eval_jet(&EvalDomain::profile(v), order)?;
        (0..=order)
            .map(|k| Ok(jet.coeff(&MultiIndex::new(&[k]))?.re))
            .collect()
    }

    /// Derivatives `f(v), f'(v), ..., f^(order)(v)`.
    fn derivatives(expr: &ExprAst, v: f64, order: usize) -> Result<Vec<f64>> {
        let c = Self::series(expr, v, order)?;
        let mut fact = 1.0;
        Ok(c
            .iter()
            .enumerate()
            .map(|(k, x)| {
                if k > 0 {
                    fact *= k as f64;
                }
                x * fact
            })
            .collect())
    }

    pub fn p_derivatives(&self, v: f64, order: usize) -> Result<Vec<f64>> {
        Self::derivatives(&self.p, v, order)
    }

    pub fn q_derivatives(&self, v: f64, order: usize) -> Result<Vec<f64>> {
        Self::derivatives(&self.q, v, order)
    }
}

/// A point in both coordinate systems, linked by `t1 = q(v) - w p'(v)`, `t2 = w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub v: f64,
    pub w: f64,
    pub t1: f64,
    pub t2: f64,
}

impl ParamPoint {
    /// Forward map from `(v, w)`.
    pub fn from_vw(profile: &PQProfile, v: f64, w: f64) -> Result<Self> {
        let p = profile.p_derivatives(v, 1)?;
        let q = profile.q_derivatives(v, 0)?;
        Ok(Self {
            v,
            w,
            t1: q[0] - w * p[1],
            t2: w,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqDiagnostics {
    pub p0: f64,
    pub q0: f64,
    pub min_q_prime: f64,
    pub min_abs_p_second: f64,
    /// Sign of `p''` over the interval.
    pub p_second_sign: f64,
    pub samples: usize,
}

/// Checks `p(0) = q(0) = 0`, `q' > 0` and `p'' != 0` on `n_samples`
/// evenly spaced points of the interval (and at 0).
pub fn pq_validate(profile: &PQProfile, n_samples: usize) -> Result<PqDiagnostics> {
    let p0 = profile.p.eval_real(0.0)?;
    let q0 = profile.q.eval_real(0.0)?;
    let violation = |condition: &str, at: f64| MaparError::ProfileViolation {
        condition: condition.to_string(),
        at,
    };
    if p0.abs() > 1e-12 {
        return Err(violation("p(0) = 0", 0.0));
    }
    if q0.abs() > 1e-12 {
        return Err(violation("q(0) = 0", 0.0));
    }
    let (a, b) = profile.interval;
    let n = n_samples.max(2);
    let mut points: Vec<f64> = (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect();
    points.push(0.0);

    let sign = profile.p_derivatives(0.0, 2)?[2].signum();
    let mut min_q = f64::INFINITY;
    let mut min_p = f64::INFINITY;
    for &v in &points {
        let q1 = profile.q_derivatives(v, 1)?[1];
        let p2 = profile.p_derivatives(v, 2)?[2];
        if !(q1 >= PROFILE_MARGIN) {
            return Err(violation("q' > 0", v));
        }
        if !(p2.abs() >= PROFILE_MARGIN) || p2.signum() != sign {
            return Err(violation("p'' != 0", v));
        }
        min_q = min_q.min(q1);
        min_p = min_p.min(p2.abs());
    }
    Ok(PqDiagnostics {
        p0,
        q0,
        min_q_prime: min_q,
        min_abs_p_second: min_p,
        p_second_sign: sign,
        samples: points.len(),
    })
}

/// Solves `t1 = q(v) - t2 p'(v)` for `v` by Newton's method from `v = 0`.
pub fn invert_point(profile: &PQProfile, t1: f64, t2: f64) -> Result<ParamPoint> {
    let mut v = 0.0_f64;
    for _ in 0..NEWTON_MAX_STEPS {
        let p = profile.p_derivatives(v, 2)?;
        let q = profile.q_derivatives(v, 1)?;
        let g = q[0] - t2 * p[1] - t1;
        let dg = q[1] - t2 * p[2];
        if dg.abs() <= JACOBIAN_GUARD {
            return Err(MaparError::JacobianSingular {
                v,
                w: t2,
                value: dg,
            });
        }
        let step = g / dg;
        v -= step;
        if !v.is_finite() {
            break;
        }
        if step.abs() <= NEWTON_TOL * (1.0 + v.abs()) {
            return Ok(ParamPoint { v, w: t2, t1, t2 });
        }
    }
    Err(MaparError::NewtonDiverged { t1, t2 })
}

/// `int_0^v q` by Gauss-Legendre, cross-checked against a lower node count.
fn integrate_q(profile: &PQProfile, v: f64) -> Result<f64> {
    let (a, b) = profile.interval;
    if v < a || v > b {
        return Err(MaparError::QuadratureUnreliable {
            v,
            reason: format!("endpoint outside the admissible interval [{a}, {b}]"),
        });
    }
    let mut failure = None;
    let mut run = |nodes: usize| {
        let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("positive node count"));
        rule.integrate(0.0, v, |x| match profile.q.eval_real(x) {
            Ok(y) => y,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        })
    };
    let fine = run(QUAD_NODES);
    let coarse = run(QUAD_CHECK_NODES);
    if let Some(e) = failure {
        return Err(e.into());
    }
    if !fine.is_finite() || (fine - coarse).abs() > QUAD_TOL * (1.0 + fine.abs()) {
        return Err(MaparError::QuadratureUnreliable {
            v,
            reason: format!("node counts disagree ({fine} vs {coarse})"),
        });
    }
    Ok(fine)
}

fn real_series(c: &[f64]) -> Vec<C64> {
    c.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn derivative_series(c: &[f64]) -> Vec<f64> {
    (1..c.len()).map(|k| k as f64 * c[k]).collect()
}

/// Jet of `rho` in `(t1, t2)` at the point `(q(v) - w p'(v), w)`.
fn rho_jet_at(profile: &PQProfile, v0: f64, w: f64, order: usize) -> Result<Jet> {
    let pc = PQProfile::series(&profile.p, v0, order + 2)?;
    let qc = PQProfile::series(&profile.q, v0, order + 1)?;
    let p1c = derivative_series(&pc);
    let p2c = derivative_series(&p1c);
    let q1c = derivative_series(&qc);

    let jac = q1c[0] - w * p2c[0];
    if jac.abs() <= JACOBIAN_GUARD {
        return Err(MaparError::JacobianSingular { v: v0, w, value: jac });
    }
    let t1 = qc[0] - w * p1c[0];
    let point = [C64::new(t1, 0.0), C64::new(w, 0.0)];
    let vars = Jet::seed_all(&point, order, ScalarKind::Real)?;
    let (t1j, t2j) = (&vars[0], &vars[1]);
    let center = C64::new(v0, 0.0);
    let (ps, p1s, p2s) = (real_series(&pc), real_series(&p1c), real_series(&p2c));
    let (qs, q1s) = (real_series(&qc), real_series(&q1c));

    // Newton in jet arithmetic; each step doubles the number of correct orders
    let mut vj = t1j.constant_like(center);
    for _ in 0..order + 2 {
        let g = vj.compose(&qs, center)?.sub(&t2j.mul(&vj.compose(&p1s, center)?)?)?.sub(t1j)?;
        let dg = vj.compose(&q1s, center)?.sub(&t2j.mul(&vj.compose(&p2s, center)?)?)?;
        vj = vj.sub(&g.div(&dg)?)?;
        vj = vj.add_const(v0 - vj.value().re);
    }

    let mut big_q = vec![integrate_q(profile, v0)?];
    big_q.extend(qc[..order].iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
    let qv = vj.compose(&qs, center)?;
    let pv = vj.compose(&ps, center)?;
    let p1v = vj.compose(&p1s, center)?;
    let int_q = vj.compose(&real_series(&big_q), center)?;
    let rho = vj
        .mul(&qv)?
        .sub(&int_q)?
        .add(&t2j.mul(&pv.sub(&vj.mul(&p1v)?)?)?)?;
    Ok(rho)
}

/// Jet of the reconstructed `rho` at `(t1, t2)`.
pub fn rho_jet_from_pq(profile: &PQProfile, t1: f64, t2: f64, order: usize) -> Result<Jet> {
    let pt = invert_point(profile, t1, t2)?;
    rho_jet_at(profile, pt.v, pt.w, order)
}

/// One comparison between a jet-derived value and its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormEntry {
    pub name: &'static str,
    pub from_jet: f64,
    pub closed_form: f64,
    /// `|from_jet - closed_form| / (1 + |closed_form|)`
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCheck {
    pub point: ParamPoint,
    pub entries: Vec<ClosedFormEntry>,
    pub max_discrepancy: f64,
}

/// Compares derivatives of the reconstructed `rho` with their expressions
/// in `p`, `q` and `w`.
pub fn closed_form_residuals(profile: &PQProfile, v: f64, w: f64) -> Result<ClosedFormCheck> {
    let p = profile.p_derivatives(v, 5)?;
    let q = profile.q_derivatives(v, 4)?;
    let a = q[1] - w * p[2];
    if a.abs() <= JACOBIAN_GUARD {
        return Err(MaparError::JacobianSingular { v, w, value: a });
    }
    let b = q[2] - w * p[3];
    let c = q[3] - w * p[4];
    let e = q[4] - w * p[5];
    let closed = [
        ("rho_11", 1.0 / a),
        ("rho_12", p[1] / a),
        ("rho_111", -b / a.powi(3)),
        ("rho_1111", -(c * a - 3.0 * b * b) / a.powi(5)),
        (
            "rho_11111",
            -((e * a - 5.0 * b * c) * a - 5.0 * (c * a - 3.0 * b * b) * b) / a.powi(7),
        ),
        ("S", p[2] / a),
        ("S_1", (p[3] * q[1] - p[2] * q[2]) / a.powi(3)),
    ];

    let rho = rho_jet_at(profile, v, w, 6)?;
    let d = |m: &[usize]| rho.d(m).map(|z| z.re);
    let slope = rho.diff_many(&[0, 1])?.div(&rho.diff_many(&[0, 0])?)?;
    let s = slope.diff(0)?;
    let from_jet = [
        d(&[2, 0])?,
        d(&[1, 1])?,
        d(&[3, 0])?,
        d(&[4, 0])?,
        d(&[5, 0])?,
        s.value().re,
        s.diff(0)?.value().re,
    ];
    let entries: Vec<ClosedFormEntry> = closed
        .iter()
        .zip(from_jet)
        .map(|(&(name, cf), fj)| ClosedFormEntry {
            name,
            from_jet: fj,
            closed_form: cf,
            discrepancy: (fj - cf).abs() / (1.0 + cf.abs()),
        })
        .collect();
    let max_discrepancy = entries.iter().map(|e| e.discrepancy).fold(0.0, f64::max);
    Ok(ClosedFormCheck {
        point: ParamPoint::from_vw(profile, v, w)?,
        entries,
        max_discrepancy,
    })
}

/// The four ODEs obtained from the Monge equation in the first variable by
/// collecting powers of `w`, evaluated at `v`.
pub fn final1_residuals(profile: &PQProfile, v: f64) -> Result<[Residual; 4]> {
    let p = profile.p_derivatives(v, 5)?;
    let q = profile.q_derivatives(v, 4)?;
    let (p2, p3, p4, p5) = (p[2], p[3], p[4], p[5]);
    let (q1, q2, q3, q4) = (q[1], q[2], q[3], q[4]);
    Ok([
        Residual::from_real_terms(&[
            9.0 * p5 * p2 * p2,
            -45.0 * p4 * p3 * p2,
            40.0 * p3.powi(3),
        ]),
        Residual::from_real_terms(&[
            6.0 * p5 * p2 * q1,
            3.0 * p2 * p2 * q4,
            -15.0 * p4 * p3 * q1,
            -15.0 * p4 * p2 * q2,
            -15.0 * p3 * p2 * q3,
            40.0 * p3 * p3 * q2,
        ]),
        Residual::from_real_terms(&[
            3.0 * p5 * q1 * q1,
            6.0 * p2 * q4 * q1,
            -15.0 * p4 * q2 * q1,
            -15.0 * p3 * q3 * q1,
            -15.0 * p2 * q3 * q2,
            40.0 * p3 * q2 * q2,
        ]),
        Residual::from_real_terms(&[
            9.0 * q4 * q1 * q1,
            -45.0 * q3 * q2 * q1,
            40.0 * q2.powi(3),
        ]),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstCurCheck {
    /// `q'/p''` at `v = 0`.
    pub ratio_at_zero: f64,
    pub max_deviation: f64,
    pub is_constant: bool,
}

/// Samples `q'/p''` over the interval and measures how far it moves.
pub fn firstcur_check(profile: &PQProfile, n_samples: usize) -> Result<FirstCurCheck> {
    let ratio = |v: f64| -> Result<f64> {
        Ok(profile.q_derivatives(v, 1)?[1] / profile.p_derivatives(v, 2)?[2])
    };
    let r0 = ratio(0.0)?;
    let (a, b) = profile.interval;
    let n = n_samples.max(2);
    let mut dev = 0.0_f64;
    for k in 0..n {
        let v = a + (b - a) * k as f64 / (n - 1) as f64;
        dev = dev.max((ratio(v)? - r0).abs());
    }
    Ok(FirstCurCheck {
        ratio_at_zero: r0,
        max_deviation: dev,
        is_constant: dev <= 1e-9 * (1.0 + r0.abs()),
    })
}

/// Residual of the classical Monge equation for `p(v)` at `v`.
pub fn monge_residual_1d(p: &ExprAst, v: f64) -> Result<Residual> {
    let d = PQProfile::derivatives(p, v, 5)?;
    let c = |x: f64| C64::new(x, 0.0);
    Ok(Residual::from_terms(&monge_terms(c(d[2]), c(d[3]), c(d[4]), c(d[5]))))
}

/// Closed-form solutions of `g'' = e^{2g}` (cases 1-3, `g = ln R` in the
/// tube-type ansatz) and of `g'' x + g' = e^{2g}` (Reinhardt ansatz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeFamily {
    /// `R = 1/(-sigma x + D)`, `D > 0`.
    Case1 { sigma: f64, d: f64 },
    /// `R = 2 sqrt(C D) e^{sigma sqrt(C) x} / (1 - D e^{2 sigma sqrt(C) x})`.
    Case2 { sigma: f64, c: f64, d: f64 },
    /// `R = sqrt(-C) / cos(sigma sqrt(-C) x + D)`.
    Case3 { sigma: f64, c: f64, d: f64 },
    /// `g = beta - ln(1 - e^{2 beta} x)`.
    Reinhardt { beta: f64 },
}

impl OdeFamily {
    pub const NAMES: [&'static str; 4] = ["case1", "case2", "case3", "reinhardt"];

    /// Builds a family from named parameters (`sigma`, `C`, `D`, `beta`).
    pub fn from_params(name: &str, params: &[(String, f64)]) -> Result<Self> {
        let get = |key: &str, default: Option<f64>| {
            params
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(key))
                .map(|(_, v)| *v)
                .or(default)
                .ok_or_else(|| MaparError::DomainGuard(format!("{name} needs parameter {key}")))
        };
        let sigma = get("sigma", Some(1.0))?;
        let fam = match name {
            "case1" => OdeFamily::Case1 {
                sigma,
                d: get("D", None)?,
            },
            "case2" => OdeFamily::Case2 {
                sigma,
                c: get("C", None)?,
                d: get("D", None)?,
            },
            "case3" => OdeFamily::Case3 {
                sigma,
                c: get("C", None)?,
                d: get("D", None)?,
            },
            "reinhardt" => OdeFamily::Reinhardt {
                beta: get("beta", None)?,
            },
            _ => return Err(MaparError::DomainGuard(format!("unknown ODE family {name}"))),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn name(&self) -> &'static str {
        match self {
            OdeFamily::Case1 { .. } => "case1",
            OdeFamily::Case2 { .. } => "case2",
            OdeFamily::Case3 { .. } => "case3",
            OdeFamily::Reinhardt { .. } => "reinhardt",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let guard = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(MaparError::DomainGuard(format!("{}: {msg}", self.name())))
            }
        };
        let sigma_ok = |s: f64| s == 1.0 || s == -1.0;
        match *self {
            OdeFamily::Case1 { sigma, d } => {
                guard(sigma_ok(sigma), "sigma must be 1 or -1")?;
                guard(d > 0.0, "D > 0 required")
            }
            OdeFamily::Case2 { sigma, c, d } => {
                guard(sigma_ok(sigma), "sigma must be 1 or -1")?;
                guard(c > 0.0, "C > 0 required")?;
                guard(d > 0.0 && d < 1.0, "0 < D < 1 required")
            }
            OdeFamily::Case3 { sigma, c, d } => {
                guard(sigma_ok(sigma), "sigma must be 1 or -1")?;
                guard(c < 0.0, "C < 0 required")?;
                guard(d > 0.0 && d < std::f64::consts::FRAC_PI_2, "0 < D < pi/2 required")
            }
            OdeFamily::Reinhardt { beta } => guard(beta.is_finite(), "beta must be finite"),
        }
    }

    /// Half of the distance from 0 to the nearest singularity, capped at 0.5.
    pub fn sample_radius(&self) -> f64 {
        let r = match *self {
            OdeFamily::Case1 { d, .. } => d,
            OdeFamily::Case2 { c, d, .. } => -d.ln() / (2.0 * c.sqrt()),
            OdeFamily::Case3 { c, d, .. } => (std::f64::consts::FRAC_PI_2 - d) / (-c).sqrt(),
            OdeFamily::Reinhardt { beta } => (-2.0 * beta).exp(),
        };
        (0.5 * r).min(0.5)
    }

    /// `n` evenly spaced points in `[-radius, radius]`.
    pub fn sample_points(&self, n: usize) -> Vec<f64> {
        let r = self.sample_radius();
        match n {
            0 => vec![],
            1 => vec![0.0],
            _ => (0..n)
                .map(|k| -r + 2.0 * r * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// The first-integral constant `C` (0 for case 1 and Reinhardt).
    pub fn constant(&self) -> f64 {
        match *self {
            OdeFamily::Case2 { c, .. } | OdeFamily::Case3 { c, .. } => c,
            _ => 0.0,
        }
    }

    /// Jet of `g` at `x`, order 2, after checking the guard.
    fn g_jet(&self, x: f64) -> Result<Jet> {
        let xj = Jet::seed(&[C64::new(x, 0.0)], 0, 2, ScalarKind::Real)?;
        let positive = |j: &Jet, what: &str| {
            if j.value().re > 1e-12 {
                Ok(())
            } else {
                Err(MaparError::DomainGuard(format!(
                    "{}: {what} is not positive at x = {x}",
                    self.name()
                )))
            }
        };
        match *self {
            OdeFamily::Case1 { sigma, d } => {
                let den = xj.scale(-sigma).add_const(d);
                positive(&den, "-sigma x + D")?;
                Ok(den.ln()?.neg())
            }
            OdeFamily::Case2 { sigma, c, d } => {
                let e = xj.scale(sigma * c.sqrt()).exp()?;
                let den = e.mul(&e)?.scale(-d).add_const(1.0);
                positive(&den, "1 - D e^(2 sigma sqrt(C) x)")?;
                let r = e.scale(2.0 * (c * d).sqrt()).div(&den)?;
                Ok(r.ln()?)
            }
            OdeFamily::Case3 { sigma, c, d } => {
                let cs = xj.scale(sigma * (-c).sqrt()).add_const(d).cos()?;
                positive(&cs, "cos(sigma sqrt(-C) x + D)")?;
                Ok(cs.recip()?.scale((-c).sqrt()).ln()?)
            }
            OdeFamily::Reinhardt { beta } => {
                let den = xj.scale(-(2.0 * beta).exp()).add_const(1.0);
                positive(&den, "1 - e^(2 beta) x")?;
                Ok(den.ln()?.neg().add_const(beta))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvilleResiduals {
    pub x: f64,
    pub g: f64,
    /// Cases 1-3: `g'' - e^{2g}`. Reinhardt: `g'' x + g' - e^{2g}`.
    pub second_order: Residual,
    /// Cases 1-3: `(g')^2 - e^{2g} - C`. Reinhardt: `(g')^2 x + g' - e^{2g}`.
    pub first_integral: Residual,
    /// `(g')^2 - e^{2g}` for cases 1-3.
    pub recovered_c: Option<f64>,
}

pub fn liouville_residuals(family: &OdeFamily, x: f64) -> Result<LiouvilleResiduals> {
    family.validate()?;
    let g = family.g_jet(x)?;
    let g0 = g.value().re;
    let g1 = g.d(&[1])?.re;
    let g2 = g.d(&[2])?.re;
    let e2g = (2.0 * g0).exp();
    Ok(match family {
        OdeFamily::Reinhardt { .. } => LiouvilleResiduals {
            x,
            g: g0,
            second_order: Residual::from_real_terms(&[g2 * x, g1, -e2g]),
            first_integral: Residual::from_real_terms(&[g1 * g1 * x, g1, -e2g]),
            recovered_c: None,
        },
        _ => LiouvilleResiduals {
            x,
            g: g0,
            second_order: Residual::from_real_terms(&[g2, -e2g]),
            first_integral: Residual::from_real_terms(&[g1 * g1, -e2g, -family.constant()]),
            recovered_c: Some(g1 * g1 - e2g),
        },
    })
}
