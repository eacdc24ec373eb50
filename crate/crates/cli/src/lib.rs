//! Library behind the `crflat` binary: configuration, the four subcommands
//! and report serialization.

pub mod args;
pub mod report;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crflat::catalog::{
    list_families, make_family, CatalogError, Expectation, Form, GridSpec, HypersurfaceSpec,
    PointOutcome, PointReport,
};
use crflat::expr::{DomainKind, ExprAst, ExprError};
use crflat::invariants::{Label, TolProfile};
use crflat::mapar::{
    closed_form_residuals, final1_residuals, firstcur_check, invert_point, liouville_residuals,
    monge_residual_1d, pq_validate, rho_jet_from_pq, MaparError, OdeFamily, PQProfile,
};
use crflat::tube::tube_invariants_from_jet;

use report::{fmt_f64, point_rows, write_csv, PointRecord, ResidualPair};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerances used for the pass/fail status of `param` and `ode`.
pub const PARAM_TOL: f64 = 1e-9;
pub const ODE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum UsageError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Mapar(#[from] MaparError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceArg {
    Family {
        name: String,
        params: Vec<(String, f64)>,
    },
    Expr {
        form: Form,
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridArgs {
    pub center: Option<Vec<f64>>,
    pub halfwidth: Option<f64>,
    pub n: Option<usize>,
}

impl GridArgs {
    fn resolve(&self, form: Form) -> Result<GridSpec, UsageError> {
        let mut g = GridSpec::default_for(form);
        if let Some(c) = &self.center {
            if c.len() != GridSpec::axes(form) {
                return Err(UsageError::Invalid(format!(
                    "--grid-center needs {} values for a {form} grid",
                    GridSpec::axes(form)
                )));
            }
            g.center = c.clone();
        }
        if let Some(h) = self.halfwidth {
            if !(h >= 0.0 && h.is_finite()) {
                return Err(UsageError::Invalid("--grid-halfwidth must be >= 0".into()));
            }
            g.halfwidth = h;
        }
        if let Some(n) = self.n {
            if n == 0 {
                return Err(UsageError::Invalid("--grid-n must be positive".into()));
            }
            g.n = n;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckArgs {
    pub source: SourceArg,
    pub grid: GridArgs,
    pub order: usize,
    pub tol: TolProfile,
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamArgs {
    pub p: String,
    pub q: String,
    /// Half-width of the `w = t2` axis.
    pub grid_w: f64,
    /// Half-width of the `t1` axis.
    pub grid_t: f64,
    pub n: usize,
    pub order: usize,
    pub samples: usize,
    pub tol: TolProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeArgs {
    pub family: Option<String>,
    pub params: Vec<(String, f64)>,
    /// Profile for the classical Monge table.
    pub p: Option<String>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Check(CheckArgs),
    Param(ParamArgs),
    Ode(OdeArgs),
    Families,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Serialized report and exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TolRecord {
    pub flat: f64,
    pub sing: f64,
    pub degeneracy: f64,
    pub rank: f64,
    pub hessian: f64,
    pub reality: f64,
}

impl From<&TolProfile> for TolRecord {
    fn from(t: &TolProfile) -> Self {
        Self {
            flat: t.flat,
            sing: t.sing,
            degeneracy: t.degeneracy,
            rank: t.rank,
            hessian: t.hessian,
            reality: t.reality,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRecord {
    pub center: Vec<f64>,
    pub halfwidth: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckConfig {
    pub command: &'static str,
    pub family: Option<String>,
    pub expr: Option<String>,
    pub form: &'static str,
    pub params: Vec<(String, f64)>,
    pub grid: GridRecord,
    pub order: usize,
    pub tol: TolRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelCounts {
    pub flat: usize,
    pub nonflat: usize,
    pub two_degenerate: usize,
    pub not_rank1: usize,
    pub out_of_domain: usize,
}

impl LabelCounts {
    fn from_labels(labels: &[Label]) -> Self {
        let count = |l: Label| labels.iter().filter(|x| **x == l).count();
        Self {
            flat: count(Label::Flat),
            nonflat: count(Label::Nonflat),
            two_degenerate: count(Label::TwoDegenerate),
            not_rank1: count(Label::NotRank1),
            out_of_domain: count(Label::OutOfDomain),
        }
    }
}

/// Largest values over the evaluated points; `None` when nothing was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Extremes {
    pub max_scaled_j: Option<f64>,
    pub max_scaled_w: Option<f64>,
    pub max_scaled_ma: Option<f64>,
    pub max_scaled_monge: Option<f64>,
    pub max_s1111: Option<f64>,
    pub max_polystruct: Option<f64>,
    pub min_abs_s: Option<f64>,
}

fn fold(acc: &mut Option<f64>, x: f64, max: bool) {
    *acc = Some(match *acc {
        None => x,
        Some(a) if max => a.max(x),
        Some(a) => a.min(x),
    });
}

impl Extremes {
    fn from_records(records: &[PointRecord]) -> Self {
        let mut e = Extremes::default();
        for r in records {
            if let Some(j) = r.j {
                fold(&mut e.max_scaled_j, j.scaled, true);
            }
            if let Some(w) = r.w {
                fold(&mut e.max_scaled_w, w.scaled, true);
            }
            if let Some(res) = r.residuals {
                fold(&mut e.max_scaled_ma, res.ma.scaled, true);
                fold(&mut e.max_scaled_monge, res.monge.scaled, true);
                if let Some(s) = res.s1111 {
                    fold(&mut e.max_s1111, s, true);
                }
                if let Some(p) = res.polystruct {
                    fold(&mut e.max_polystruct, p, true);
                }
            }
            if let Some(s) = r.s {
                fold(&mut e.min_abs_s, s.abs(), false);
            }
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub points: usize,
    pub evaluated: usize,
    pub labels: LabelCounts,
    #[serde(flatten)]
    pub extremes: Extremes,
    pub expected: &'static str,
    pub expectation_met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub config: CheckConfig,
    pub points: Vec<PointRecord>,
    pub summary: CheckSummary,
}

impl CheckReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.expectation_met {
            EXIT_OK
        } else {
            EXIT_MISMATCH
        }
    }
}

fn resolve_source(source: &SourceArg) -> Result<HypersurfaceSpec, UsageError> {
    Ok(match source {
        SourceArg::Family { name, params } => make_family(name, params)?,
        SourceArg::Expr { form, text } => {
            let domain = match form {
                Form::Tube => DomainKind::Tube,
                Form::Rigid => DomainKind::Rigid,
            };
            HypersurfaceSpec::from_expr("expr", *form, ExprAst::parse(text, domain)?)
        }
    })
}

fn check_order(order: usize) -> Result<(), UsageError> {
    if (5..=8).contains(&order) {
        Ok(())
    } else {
        Err(UsageError::Invalid(format!("--order must be in 5..=8, got {order}")))
    }
}

/// Evaluates a hypersurface over a grid.
pub fn check(args: &CheckArgs) -> Result<CheckReport, UsageError> {
    check_order(args.order)?;
    let spec = resolve_source(&args.source)?;
    let grid = args.grid.resolve(spec.form)?;
    let points = grid.points();
    let records: Vec<PointRecord> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| PointRecord::new(i, p, spec.evaluate(p, args.order, &args.tol)))
        .collect();
    let labels: Vec<Label> = records.iter().map(PointRecord::label).collect();
    let expected = args.expect.unwrap_or(spec.expected);
    let (family, expr) = match &args.source {
        SourceArg::Family { name, .. } => (Some(name.clone()), None),
        SourceArg::Expr { text, .. } => (None, Some(text.clone())),
    };
    Ok(CheckReport {
        config: CheckConfig {
            command: "check",
            family,
            expr,
            form: spec.form.as_str(),
            params: spec.params.clone(),
            grid: GridRecord {
                center: grid.center.clone(),
                halfwidth: grid.halfwidth,
                n: grid.n,
            },
            order: args.order,
            tol: (&args.tol).into(),
        },
        summary: CheckSummary {
            points: records.len(),
            evaluated: labels.iter().filter(|l| **l != Label::OutOfDomain).count(),
            labels: LabelCounts::from_labels(&labels),
            extremes: Extremes::from_records(&records),
            expected: expected.as_str(),
            expectation_met: expected.is_met(&labels),
        },
        points: records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub ok: bool,
    pub error: Option<String>,
    pub min_q_prime: Option<f64>,
    pub min_abs_p_second: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamPointRecord {
    pub index: usize,
    pub t: [f64; 2],
    pub v: Option<f64>,
    pub w: f64,
    pub closed_form_max: Option<f64>,
    pub final1: Option<[ResidualPair; 4]>,
    pub tube: PointRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstCurRecord {
    pub ratio_at_zero: f64,
    pub max_deviation: f64,
    pub is_constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub points: usize,
    pub labels: LabelCounts,
    pub max_scaled_ma: Option<f64>,
    pub max_closed_form: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamConfig {
    pub command: &'static str,
    pub p: String,
    pub q: String,
    pub grid_t: f64,
    pub grid_w: f64,
    pub n: usize,
    pub order: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamReport {
    pub config: ParamConfig,
    pub validation: ValidationRecord,
    pub firstcur: Option<FirstCurRecord>,
    pub points: Vec<ParamPointRecord>,
    pub summary: ParamSummary,
}

/// Runs the profile pipeline: validation, reconstruction of the tube on a
/// grid, closed-form comparisons and the four-ODE residuals.
pub fn param(args: &ParamArgs) -> Result<ParamReport, UsageError> {
    check_order(args.order)?;
    if args.n == 0 {
        return Err(UsageError::Invalid("--grid-n must be positive".into()));
    }
    let profile = PQProfile::parse(&args.p, &args.q)?;
    let config = ParamConfig {
        command: "param",
        p: args.p.clone(),
        q: args.q.clone(),
        grid_t: args.grid_t,
        grid_w: args.grid_w,
        n: args.n,
        order: args.order,
        samples: args.samples,
    };
    let validation = match pq_validate(&profile, args.samples) {
        Ok(d) => ValidationRecord {
            ok: true,
            error: None,
            min_q_prime: Some(d.min_q_prime),
            min_abs_p_second: Some(d.min_abs_p_second),
        },
        Err(e) => ValidationRecord {
            ok: false,
            error: Some(e.to_string()),
            min_q_prime: None,
            min_abs_p_second: None,
        },
    };
    let firstcur = firstcur_check(&profile, args.samples).ok().map(|c| FirstCurRecord {
        ratio_at_zero: c.ratio_at_zero,
        max_deviation: c.max_deviation,
        is_constant: c.is_constant,
    });

    let axis = |h: f64| -> Vec<f64> {
        if args.n == 1 {
            vec![0.0]
        } else {
            (0..args.n)
                .map(|k| -h + 2.0 * h * k as f64 / (args.n - 1) as f64)
                .collect()
        }
    };
    let grid: Vec<[f64; 2]> = axis(args.grid_t)
        .into_iter()
        .flat_map(|t1| axis(args.grid_w).into_iter().map(move |t2| [t1, t2]))
        .collect();
    let points: Vec<ParamPointRecord> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &[t1, t2])| param_point(&profile, i, t1, t2, args))
        .collect();

    let labels: Vec<Label> = points.iter().map(|p| p.tube.label()).collect();
    let mut max_ma = None;
    let mut max_cf = None;
    for p in &points {
        if let Some(r) = p.tube.residuals {
            fold(&mut max_ma, r.ma.scaled, true);
        }
        if let Some(c) = p.closed_form_max {
            fold(&mut max_cf, c, true);
        }
    }
    let all_evaluated = points
        .iter()
        .all(|p| p.tube.residuals.is_some() && p.closed_form_max.is_some());
    let passed = validation.ok
        && all_evaluated
        && max_ma.is_some_and(|m| m < PARAM_TOL)
        && max_cf.is_some_and(|m| m < PARAM_TOL);
    Ok(ParamReport {
        config,
        validation,
        firstcur,
        summary: ParamSummary {
            points: points.len(),
            labels: LabelCounts::from_labels(&labels),
            max_scaled_ma: max_ma,
            max_closed_form: max_cf,
            passed,
        },
        points,
    })
}

fn param_point(profile: &PQProfile, index: usize, t1: f64, t2: f64, args: &ParamArgs) -> ParamPointRecord {
    let grid_point = crflat::catalog::GridPoint::Tube([t1, t2]);
    let inverted = invert_point(profile, t1, t2);
    let v = inverted.as_ref().ok().map(|p| p.v);
    let outcome = match rho_jet_from_pq(profile, t1, t2, args.order) {
        Ok(jet) => match tube_invariants_from_jet(&jet, &args.tol) {
            Ok(r) => PointOutcome::Evaluated(Box::new(PointReport::Tube(r))),
            Err(e) => PointOutcome::Skipped {
                reason: e.to_string(),
            },
        },
        Err(e) => PointOutcome::Skipped {
            reason: e.to_string(),
        },
    };
    let closed_form_max = v.and_then(|v| {
        closed_form_residuals(profile, v, t2)
            .ok()
            .map(|c| c.max_discrepancy)
    });
    let final1 = v.and_then(|v| {
        final1_residuals(profile, v)
            .ok()
            .map(|r| r.map(ResidualPair::from))
    });
    ParamPointRecord {
        index,
        t: [t1, t2],
        v,
        w: t2,
        closed_form_max,
        final1,
        tube: PointRecord::new(index, &grid_point, outcome),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeRow {
    pub x: f64,
    pub g: Option<f64>,
    pub second_order: Option<ResidualPair>,
    pub first_integral: Option<ResidualPair>,
    pub recovered_c: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MongeRow {
    pub v: f64,
    pub residual: Option<ResidualPair>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeConfig {
    pub command: &'static str,
    pub ode_family: Option<String>,
    pub params: Vec<(String, f64)>,
    pub p: Option<String>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeReport {
    pub config: OdeConfig,
    pub liouville: Vec<OdeRow>,
    pub monge: Vec<MongeRow>,
    pub passed: bool,
}

/// Liouville residuals at sample points, and the classical Monge residual
/// of `p` over `[-0.5, 0.5]` when a profile is given.
pub fn ode(args: &OdeArgs) -> Result<OdeReport, UsageError> {
    if args.family.is_none() && args.p.is_none() {
        return Err(UsageError::Invalid(
            "ode needs --ode-family or --p".into(),
        ));
    }
    let family = args
        .family
        .as_deref()
        .map(|name| OdeFamily::from_params(name, &args.params))
        .transpose()?;
    let p = args
        .p
        .as_deref()
        .map(|s| ExprAst::parse(s, DomainKind::Profile))
        .transpose()?;

    let liouville: Vec<OdeRow> = family
        .map(|fam| {
            fam.sample_points(args.samples)
                .into_iter()
                .map(|x| match liouville_residuals(&fam, x) {
                    Ok(r) => OdeRow {
                        x,
                        g: Some(r.g),
                        second_order: Some(r.second_order.into()),
                        first_integral: Some(r.first_integral.into()),
                        recovered_c: r.recovered_c,
                        error: None,
                    },
                    Err(e) => OdeRow {
                        x,
                        g: None,
                        second_order: None,
                        first_integral: None,
                        recovered_c: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect()
        })
        .unwrap_or_default();
    let monge: Vec<MongeRow> = p
        .map(|p| {
            let n = args.samples.max(2);
            (0..n)
                .map(|k| {
                    let v = -0.5 + k as f64 / (n - 1) as f64;
                    match monge_residual_1d(&p, v) {
                        Ok(r) => MongeRow {
                            v,
                            residual: Some(r.into()),
                            error: None,
                        },
                        Err(e) => MongeRow {
                            v,
                            residual: None,
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect()
        })
        .unwrap_or_default();
    let small = |r: Option<ResidualPair>| r.is_some_and(|r| r.raw < ODE_TOL);
    let passed = liouville
        .iter()
        .all(|r| small(r.second_order) && small(r.first_integral))
        && monge.iter().all(|r| r.residual.is_some_and(|r| r.scaled < ODE_TOL));
    Ok(OdeReport {
        config: OdeConfig {
            command: "ode",
            ode_family: args.family.clone(),
            params: args.params.clone(),
            p: args.p.clone(),
            samples: args.samples,
        },
        liouville,
        monge,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSchemaRecord {
    pub name: String,
    pub range: String,
    pub default: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyRecord {
    pub name: &'static str,
    pub form: &'static str,
    pub expected: &'static str,
    pub params: Vec<ParamSchemaRecord>,
    pub description: &'static str,
}

pub fn families() -> Vec<FamilyRecord> {
    list_families()
        .into_iter()
        .map(|f| FamilyRecord {
            name: f.name,
            form: f.form.as_str(),
            expected: f.expected.as_str(),
            params: f
                .params
                .iter()
                .map(|s| ParamSchemaRecord {
                    name: s.name.clone(),
                    range: s.range_string(),
                    default: s.default,
                })
                .collect(),
            description: f.description,
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), fmt_f64)
}

fn render(command: &Command, format: Format) -> Result<Outcome, UsageError> {
    Ok(match command {
        Command::Check(a) => {
            let r = check(a)?;
            let text = match format {
                Format::Json => to_json(&r),
                Format::Csv => write_csv(&point_rows(&r.points, r.config.form == "rigid")),
            };
            Outcome {
                text,
                exit_code: r.exit_code(),
            }
        }
        Command::Param(a) => {
            let r = param(a)?;
            let text = match format {
                Format::Json => to_json(&r),
                Format::Csv => {
                    let records: Vec<PointRecord> = r.points.iter().map(|p| p.tube.clone()).collect();
                    let mut rows = point_rows(&records, false);
                    rows[0].extend(["v", "closed_form_max"].map(String::from));
                    for (row, p) in rows[1..].iter_mut().zip(&r.points) {
                        row.push(opt(p.v));
                        row.push(opt(p.closed_form_max));
                    }
                    write_csv(&rows)
                }
            };
            Outcome {
                text,
                exit_code: if r.summary.passed { EXIT_OK } else { EXIT_MISMATCH },
            }
        }
        Command::Ode(a) => {
            let r = ode(a)?;
            let text = match format {
                Format::Json => to_json(&r),
                Format::Csv => {
                    let mut rows = vec![["table", "x", "g", "second_raw", "first_raw", "recovered_c", "error"]
                        .map(String::from)
                        .to_vec()];
                    for o in &r.liouville {
                        rows.push(vec![
                            "liouville".into(),
                            fmt_f64(o.x),
                            opt(o.g),
                            opt(o.second_order.map(|r| r.raw)),
                            opt(o.first_integral.map(|r| r.raw)),
                            opt(o.recovered_c),
                            o.error.clone().unwrap_or_default(),
                        ]);
                    }
                    for m in &r.monge {
                        rows.push(vec![
                            "monge".into(),
                            fmt_f64(m.v),
                            String::new(),
                            opt(m.residual.map(|r| r.raw)),
                            opt(m.residual.map(|r| r.scaled)),
                            String::new(),
                            m.error.clone().unwrap_or_default(),
                        ]);
                    }
                    write_csv(&rows)
                }
            };
            Outcome {
                text,
                exit_code: if r.passed { EXIT_OK } else { EXIT_MISMATCH },
            }
        }
        Command::Families => {
            let fams = families();
            let text = match format {
                Format::Json => to_json(&fams),
                Format::Csv => {
                    let mut rows = vec![["name", "form", "expected", "params", "description"]
                        .map(String::from)
                        .to_vec()];
                    for f in &fams {
                        let params = f
                            .params
                            .iter()
                            .map(|p| format!("{} in {}", p.name, p.range))
                            .collect::<Vec<_>>()
                            .join("; ");
                        rows.push(vec![
                            f.name.into(),
                            f.form.into(),
                            f.expected.into(),
                            params,
                            f.description.into(),
                        ]);
                    }
                    write_csv(&rows)
                }
            };
            Outcome {
                text,
                exit_code: EXIT_OK,
            }
        }
    })
}

/// Runs one command and writes the report to `config.out` if given.
/// The returned text is the serialized report either way.
pub fn run(config: &RunConfig) -> Result<Outcome, UsageError> {
    let outcome = render(&config.command, config.format)?;
    if let Some(path) = &config.out {
        std::fs::write(path, &outcome.text).map_err(|source| UsageError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(outcome)
}
