//! Builtin hypersurfaces: the classified flat rigid families, the
//! Fels-Kaup example, the light-cone tube and two nonflat controls.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use thiserror::Error;

use crate::expr::{BinOp, DomainKind, ExprAst, ExprError};
use crate::invariants::{InvariantError, Label, TolProfile};
use crate::jet::C64;
use crate::mapar::{rho_jet_from_pq, MaparError, PQProfile};
use crate::rigid::{rigid_classify, rigid_invariants, RigidPoint, RigidReport};
use crate::tube::{tube_classify, tube_invariants, tube_invariants_from_jet, InvariantReport};

/// Guards must stay at least this far from 0 in absolute value.
pub const GUARD_MARGIN: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("parameter {name} = {value} outside {range}")]
    ParamOutOfRange {
        name: String,
        value: f64,
        range: String,
    },
    #[error("family {family} has no parameter {name}")]
    UnknownParam { family: String, name: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Mapar(#[from] MaparError),
}

pub type Result<T> = std::result::Result<T, CatalogError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Tube,
    Rigid,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Tube => "tube",
            Form::Rigid => "rigid",
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Expectation {
    Flat,
    Nonflat,
    Unknown,
}

impl Expectation {
    pub fn as_str(self) -> &'static str {
        match self {
            Expectation::Flat => "flat",
            Expectation::Nonflat => "nonflat",
            Expectation::Unknown => "unknown",
        }
    }

    /// Whether a set of point labels meets the expectation. Points outside
    /// the domain are ignored, but at least one point must be evaluated.
    ///
    /// Flat: every point flat. Nonflat: some point nonflat or not rank 1.
    /// Unknown: every point is a valid rank-1, 2-nondegenerate point.
    pub fn is_met(self, labels: &[Label]) -> bool {
        let inside: Vec<Label> = labels
            .iter()
            .copied()
            .filter(|l| *l != Label::OutOfDomain)
            .collect();
        if inside.is_empty() {
            return false;
        }
        match self {
            Expectation::Flat => inside.iter().all(|l| *l == Label::Flat),
            Expectation::Nonflat => inside
                .iter()
                .any(|l| matches!(l, Label::Nonflat | Label::NotRank1)),
            Expectation::Unknown => inside
                .iter()
                .all(|l| matches!(l, Label::Flat | Label::Nonflat)),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Admissible range of a parameter; bounds are open.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSchema {
    pub name: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Closed bounds (gauge coefficients live in `[-1, 1]`).
    pub closed: bool,
    pub default: f64,
}

impl ParamSchema {
    fn open(name: &str, lower: Option<f64>, upper: Option<f64>, default: f64) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
            closed: false,
            default,
        }
    }

    fn gauge(name: String) -> Self {
        Self {
            name,
            lower: Some(-1.0),
            upper: Some(1.0),
            closed: true,
            default: 0.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo = self.lower.is_none_or(|a| if self.closed { x >= a } else { x > a });
        let hi = self.upper.is_none_or(|b| if self.closed { x <= b } else { x < b });
        x.is_finite() && lo && hi
    }

    pub fn range_string(&self) -> String {
        let (l, r) = if self.closed { ("[", "]") } else { ("(", ")") };
        let lo = self.lower.map_or("-inf".to_string(), |a| a.to_string());
        let hi = self.upper.map_or("inf".to_string(), |b| b.to_string());
        format!("{l}{lo}, {hi}{r}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub name: String,
    pub expr: ExprAst,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Expr(ExprAst),
    Profile(PQProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceSpec {
    pub name: String,
    pub form: Form,
    pub source: Source,
    pub params: Vec<(String, f64)>,
    pub guards: Vec<Guard>,
    pub expected: Expectation,
}

/// One point of an evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    Tube([f64; 2]),
    Rigid(RigidPoint),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointReport {
    Tube(InvariantReport),
    Rigid(RigidReport),
}

impl PointReport {
    pub fn label(&self) -> Label {
        match self {
            PointReport::Tube(r) => tube_classify(r),
            PointReport::Rigid(r) => rigid_classify(r),
        }
    }
}

/// Outcome at one grid point; skips carry the reason.
#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Evaluated(Box<PointReport>),
    Skipped { reason: String },
}

impl PointOutcome {
    pub fn label(&self) -> Label {
        match self {
            PointOutcome::Evaluated(r) => r.label(),
            PointOutcome::Skipped { .. } => Label::OutOfDomain,
        }
    }
}

impl HypersurfaceSpec {
    /// A user-supplied expression with the given form and no guards.
    pub fn from_expr(name: &str, form: Form, expr: ExprAst) -> Self {
        Self {
            name: name.into(),
            form,
            source: Source::Expr(expr),
            params: vec![],
            guards: vec![],
            expected: Expectation::Unknown,
        }
    }

    pub fn expr(&self) -> Option<&ExprAst> {
        match &self.source {
            Source::Expr(e) => Some(e),
            Source::Profile(_) => None,
        }
    }

    /// Name of the first guard closer to 0 than `GUARD_MARGIN` at the point.
    pub fn failing_guard(&self, point: &GridPoint) -> Option<String> {
        self.guards.iter().find_map(|g| {
            let v = match point {
                GridPoint::Tube([t1, t2]) => {
                    g.expr.eval_scalar_at(&[C64::new(*t1, 0.0), C64::new(*t2, 0.0)])
                }
                GridPoint::Rigid(p) => g.expr.eval_scalar(&p.domain()),
            };
            match v {
                Ok(v) if v.norm() >= GUARD_MARGIN => None,
                _ => Some(g.name.clone()),
            }
        })
    }

    /// Evaluates the invariants at one point. Guard failures and domain
    /// errors become skips.
    pub fn evaluate(&self, point: &GridPoint, order: usize, tol: &TolProfile) -> PointOutcome {
        if let Some(guard) = self.failing_guard(point) {
            return PointOutcome::Skipped {
                reason: format!("guard {guard}"),
            };
        }
        let result: std::result::Result<PointReport, String> = match (&self.source, point) {
            (Source::Expr(e), GridPoint::Tube([t1, t2])) => tube_invariants(e, *t1, *t2, order, tol)
                .map(PointReport::Tube)
                .map_err(|e| e.to_string()),
            (Source::Expr(e), GridPoint::Rigid(p)) => rigid_invariants(e, *p, order, tol)
                .map(PointReport::Rigid)
                .map_err(|e| e.to_string()),
            (Source::Profile(pr), GridPoint::Tube([t1, t2])) => rho_jet_from_pq(pr, *t1, *t2, order)
                .map_err(|e| e.to_string())
                .and_then(|jet| {
                    tube_invariants_from_jet(&jet, tol)
                        .map(PointReport::Tube)
                        .map_err(|e: InvariantError| e.to_string())
                }),
            (Source::Profile(_), GridPoint::Rigid(_)) => {
                Err("profile families are evaluated on tube grids".into())
            }
        };
        match result {
            Ok(r) => PointOutcome::Evaluated(Box::new(r)),
            Err(reason) => PointOutcome::Skipped { reason },
        }
    }

    /// The default grid for the family's form.
    pub fn default_grid(&self) -> GridSpec {
        GridSpec::default_for(self.form)
    }
}

/// A regular grid: `n` points per axis over `center +- halfwidth`. Tube
/// grids have two axes `(t1, t2)`; rigid grids four
/// `(Re z1, Im z1, Re z2, Im z2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub form: Form,
    pub center: Vec<f64>,
    pub halfwidth: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn default_for(form: Form) -> Self {
        Self {
            form,
            center: vec![0.0; Self::axes(form)],
            halfwidth: 0.05,
            n: 3,
        }
    }

    pub fn axes(form: Form) -> usize {
        match form {
            Form::Tube => 2,
            Form::Rigid => 4,
        }
    }

    fn axis(&self, k: usize) -> Vec<f64> {
        let c = self.center[k];
        match self.n {
            0 => vec![],
            1 => vec![c],
            n => (0..n)
                .map(|j| c - self.halfwidth + 2.0 * self.halfwidth * j as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// All points in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<GridPoint> {
        let axes: Vec<Vec<f64>> = (0..Self::axes(self.form)).map(|k| self.axis(k)).collect();
        let mut coords: Vec<Vec<f64>> = vec![vec![]];
        for axis in &axes {
            coords = coords
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        coords
            .into_iter()
            .map(|c| match self.form {
                Form::Tube => GridPoint::Tube([c[0], c[1]]),
                Form::Rigid => GridPoint::Rigid(RigidPoint::new(
                    C64::new(c[0], c[1]),
                    C64::new(c[2], c[3]),
                )),
            })
            .collect()
    }
}

/// Listing entry for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub form: Form,
    pub expected: Expectation,
    pub params: Vec<ParamSchema>,
    pub description: &'static str,
}

const FAMILY_NAMES: [&str; 10] = [
    "thm54_i",
    "thm54_i_rigid",
    "thm54_ii",
    "thm54_iii",
    "thm54_ii_exp",
    "thm54_iii_trig",
    "fk",
    "lightcone_tube",
    "pq_generic",
    "perturbed_i",
];

fn gauge_params() -> Vec<ParamSchema> {
    (0..5)
        .map(|k| ParamSchema::gauge(format!("u{k}")))
        .chain((0..5).map(|k| ParamSchema::gauge(format!("ui{k}"))))
        .collect()
}

fn family_info(name: &str) -> Option<FamilyInfo> {
    let d_pos = || vec![ParamSchema::open("D", Some(0.0), None, 1.0)];
    let d_unit = || vec![ParamSchema::open("D", Some(0.0), Some(1.0), 0.25)];
    let d_angle = || vec![ParamSchema::open("D", Some(0.0), Some(FRAC_PI_2), FRAC_PI_2 / 2.0)];
    let with_gauge = |mut v: Vec<ParamSchema>| {
        v.extend(gauge_params());
        v
    };
    use Expectation::*;
    use Form::*;
    let (form, expected, params, description) = match name {
        "thm54_i" => (Tube, Flat, d_pos(), "rho = 2 t1^2/(t2 + D), D > 0"),
        "thm54_i_rigid" => (
            Rigid,
            Flat,
            with_gauge(d_pos()),
            "F = (z1 + z1b)^2/(z2 + z2b + D), D > 0",
        ),
        "thm54_ii" => (
            Rigid,
            Flat,
            with_gauge(d_unit()),
            "F = (z1^2 + 2 sqrt(D) |z1|^2 |z2+1|^2 + z1b^2)/(1 - D |z2+1|^4), 0 < D < 1",
        ),
        "thm54_iii" => (
            Rigid,
            Flat,
            with_gauge(d_angle()),
            "F = (i (e^{iD}(z2+1)^2 - e^{-iD}(z2b+1)^2)(z1^2 + z1b^2) - 4 |z1|^2 |z2+1|^2)/(e^{iD}(z2+1)^2 + e^{-iD}(z2b+1)^2), 0 < D < pi/2",
        ),
        "thm54_ii_exp" => (
            Rigid,
            Flat,
            with_gauge(d_unit()),
            "F = (z1^2 + 2 sqrt(D) e^{z2+z2b} |z1|^2 + z1b^2)/(1 - D e^{2(z2+z2b)}), 0 < D < 1",
        ),
        "thm54_iii_trig" => (
            Rigid,
            Flat,
            with_gauge(d_angle()),
            "F = (sin(z2+z2b+D)(z1^2 + z1b^2) + 2 |z1|^2)/cos(z2+z2b+D), 0 < D < pi/2",
        ),
        "fk" => (
            Rigid,
            Flat,
            gauge_params(),
            "F = |z1|^2/(1-|z2|^2) + z2b z1^2/(2(1-|z2|^2)) + z2 z1b^2/(2(1-|z2|^2))",
        ),
        "lightcone_tube" => (
            Tube,
            Flat,
            vec![],
            "rho = sqrt(t1^2 + (1+t2)^2) - 1 - t2, the future light cone as a graph",
        ),
        "pq_generic" => (
            Tube,
            Nonflat,
            vec![],
            "tube from the profiles p = v^2/2 + v^4, q = v",
        ),
        "perturbed_i" => (
            Tube,
            Nonflat,
            d_pos(),
            "rho = 2 t1^2/(t2 + D) + 0.1 t1^4, not a Monge-Ampere solution",
        ),
        _ => return None,
    };
    let name = FAMILY_NAMES.iter().find(|n| **n == name)?;
    Some(FamilyInfo {
        name,
        form,
        expected,
        params,
        description,
    })
}

/// Every family in a fixed order.
pub fn list_families() -> Vec<FamilyInfo> {
    FAMILY_NAMES
        .iter()
        .map(|n| family_info(n).expect("listed family"))
        .collect()
}

/// Real literal suitable for splicing into an expression.
fn lit(x: f64) -> String {
    if x < 0.0 {
        format!("({x})")
    } else {
        format!("{x}")
    }
}

/// `z1^2 u(z2) + z1b^2 conj(u)(z2b)` for `u = sum_k (u_k + i ui_k) z2^k`.
fn gauge_term(values: &[(String, f64)]) -> Option<String> {
    let get = |key: String| values.iter().find(|(k, _)| *k == key).map_or(0.0, |(_, v)| *v);
    let coeffs: Vec<(usize, f64, f64)> = (0..5)
        .map(|k| (k, get(format!("u{k}")), get(format!("ui{k}"))))
        .filter(|(_, a, b)| *a != 0.0 || *b != 0.0)
        .collect();
    if coeffs.is_empty() {
        return None;
    }
    let poly = |var: &str, sign: f64| {
        coeffs
            .iter()
            .map(|(k, a, b)| format!("({}+{}*i)*{var}^{k}", lit(*a), lit(sign * b)))
            .collect::<Vec<_>>()
            .join("+")
    };
    Some(format!(
        "z1^2*({}) + z1b^2*({})",
        poly("z2", 1.0),
        poly("z2b", -1.0)
    ))
}

/// Builds a family from `name` and parameter overrides.
pub fn make_family(name: &str, params: &[(String, f64)]) -> Result<HypersurfaceSpec> {
    let info = family_info(name).ok_or_else(|| CatalogError::UnknownFamily(name.into()))?;
    let mut values: Vec<(String, f64)> = Vec::new();
    for (k, v) in params {
        let schema = info
            .params
            .iter()
            .find(|s| s.name == *k)
            .ok_or_else(|| CatalogError::UnknownParam {
                family: name.into(),
                name: k.clone(),
            })?;
        if !schema.contains(*v) {
            return Err(CatalogError::ParamOutOfRange {
                name: k.clone(),
                value: *v,
                range: schema.range_string(),
            });
        }
        values.retain(|(n, _)| n != k);
        values.push((k.clone(), *v));
    }
    let full: Vec<(String, f64)> = info
        .params
        .iter()
        .map(|s| {
            let v = values.iter().find(|(n, _)| *n == s.name).map_or(s.default, |(_, v)| *v);
            (s.name.clone(), v)
        })
        .collect();
    let d = full.iter().find(|(n, _)| n == "D").map(|(_, v)| *v);
    let d = || lit(d.expect("family has D"));

    let (text, guards): (String, Vec<String>) = match name {
        "thm54_i" => (format!("2*t1^2/(t2+{})", d()), vec![format!("t2+{}", d())]),
        "thm54_i_rigid" => (
            format!("(z1+z1b)^2/(z2+z2b+{})", d()),
            vec![format!("z2+z2b+{}", d())],
        ),
        "thm54_ii" => {
            let den = format!("1-{}*((z2+1)*(z2b+1))^2", d());
            (
                format!(
                    "(z1^2+2*sqrt({})*z1*z1b*(z2+1)*(z2b+1)+z1b^2)/({den})",
                    d()
                ),
                vec![den],
            )
        }
        "thm54_iii" => {
            let den = format!(
                "exp(i*{d})*(z2+1)^2+exp(-i*{d})*(z2b+1)^2",
                d = d()
            );
            (
                format!(
                    "(i*(exp(i*{d})*(z2+1)^2-exp(-i*{d})*(z2b+1)^2)*(z1^2+z1b^2)-4*z1*z1b*(z2+1)*(z2b+1))/({den})",
                    d = d()
                ),
                vec![den],
            )
        }
        "thm54_ii_exp" => {
            let den = format!("1-{}*exp(2*(z2+z2b))", d());
            (
                format!(
                    "(z1^2+2*sqrt({})*exp(z2+z2b)*z1*z1b+z1b^2)/({den})",
                    d()
                ),
                vec![den],
            )
        }
        "thm54_iii_trig" => {
            let den = format!("cos(z2+z2b+{})", d());
            (
                format!(
                    "(sin(z2+z2b+{})*(z1^2+z1b^2)+2*z1*z1b)/{den}",
                    d()
                ),
                vec![den],
            )
        }
        "fk" => (
            "z1*z1b/(1-z2*z2b)+z2b/(2*(1-z2*z2b))*z1^2+z2/(2*(1-z2*z2b))*z1b^2".into(),
            vec!["1-z2*z2b".into()],
        ),
        "lightcone_tube" => (
            "sqrt(t1^2+(1+t2)^2)-1-t2".into(),
            vec!["t1^2+(1+t2)^2".into()],
        ),
        "perturbed_i" => (
            format!("2*t1^2/(t2+{})+0.1*t1^4", d()),
            vec![format!("t2+{}", d())],
        ),
        "pq_generic" => {
            let profile = PQProfile::parse("v^2/2+v^4", "v")?;
            return Ok(HypersurfaceSpec {
                name: name.into(),
                form: Form::Tube,
                source: Source::Profile(profile),
                params: full,
                guards: vec![],
                expected: info.expected,
            });
        }
        _ => unreachable!("family_info accepted {name}"),
    };

    let domain = match info.form {
        Form::Tube => DomainKind::Tube,
        Form::Rigid => DomainKind::Rigid,
    };
    let mut expr = ExprAst::parse(&text, domain)?;
    if let Some(g) = gauge_term(&full) {
        expr = expr.combine(BinOp::Add, &ExprAst::parse(&g, domain)?)?;
    }
    let guards = guards
        .into_iter()
        .map(|g| {
            Ok(Guard {
                expr: ExprAst::parse(&g, domain)?,
                name: g,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HypersurfaceSpec {
        name: name.into(),
        form: info.form,
        source: Source::Expr(expr),
        params: full,
        guards,
        expected: info.expected,
    })
}
