//! Serializable report records and their CSV rendering.

use num_complex::Complex64;
use serde::Serialize;

use crflat::catalog::{GridPoint, PointOutcome, PointReport};
use crflat::invariants::{Flags, Label, Predicates, Quantity};

/// A real or complex number; complex values serialize as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Complex([f64; 2]),
}

impl Num {
    pub fn abs(self) -> f64 {
        match self {
            Num::Real(x) => x.abs(),
            Num::Complex([a, b]) => a.hypot(b),
        }
    }

    fn csv_cells(self) -> [String; 2] {
        match self {
            Num::Real(x) => [fmt_f64(x), fmt_f64(0.0)],
            Num::Complex([a, b]) => [fmt_f64(a), fmt_f64(b)],
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Real(x)
    }
}

impl From<Complex64> for Num {
    fn from(z: Complex64) -> Self {
        Num::Complex([z.re, z.im])
    }
}

/// Same text as the JSON serializer produces for the number.
pub fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&x).expect("float serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scaled {
    pub value: Num,
    pub scaled: f64,
}

impl<T: Into<Num>> From<Quantity<T>> for Scaled {
    fn from(q: Quantity<T>) -> Self {
        Scaled {
            value: q.value.into(),
            scaled: q.scaled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualPair {
    pub raw: f64,
    pub scaled: f64,
}

impl From<crflat::invariants::Residual> for ResidualPair {
    fn from(r: crflat::invariants::Residual) -> Self {
        Self {
            raw: r.raw,
            scaled: r.scaled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// Real or complex homogeneous Monge-Ampere residual.
    pub ma: ResidualPair,
    /// Monge residual in the first variable (complex Monge for rigid).
    pub monge: ResidualPair,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s1111: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polystruct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PointCoords {
    Tube([f64; 2]),
    Rigid([[f64; 2]; 2]),
}

impl PointCoords {
    fn csv_cells(&self) -> Vec<String> {
        match self {
            PointCoords::Tube(t) => t.iter().map(|x| fmt_f64(*x)).collect(),
            PointCoords::Rigid(z) => z.iter().flatten().map(|x| fmt_f64(*x)).collect(),
        }
    }
}

impl From<&GridPoint> for PointCoords {
    fn from(p: &GridPoint) -> Self {
        match p {
            GridPoint::Tube(t) => PointCoords::Tube(*t),
            GridPoint::Rigid(r) => PointCoords::Rigid([[r.z1.re, r.z1.im], [r.z2.re, r.z2.im]]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub point: PointCoords,
    #[serde(rename = "S")]
    pub s: Option<Num>,
    #[serde(rename = "S1")]
    pub s1: Option<Num>,
    #[serde(rename = "S1bar", skip_serializing_if = "Option::is_none")]
    pub s1bar: Option<Num>,
    #[serde(rename = "J")]
    pub j: Option<Scaled>,
    #[serde(rename = "W")]
    pub w: Option<Scaled>,
    pub residuals: Option<Residuals>,
    pub predicates: Option<PredicateRecord>,
    pub flags: Option<FlagRecord>,
    pub label: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip)]
    pub outcome: PointOutcome,
}

/// Serializable mirror of [`Predicates`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredicateRecord {
    pub hessian_positive: bool,
    pub two_nondegenerate: bool,
    pub levi_rank1: bool,
    pub flat: bool,
}

impl From<Predicates> for PredicateRecord {
    fn from(p: Predicates) -> Self {
        Self {
            hessian_positive: p.hessian_positive,
            two_nondegenerate: p.two_nondegenerate,
            levi_rank1: p.levi_rank1,
            flat: p.flat,
        }
    }
}

/// Serializable mirror of [`Flags`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlagRecord {
    pub j_reduced_formula_used: bool,
    pub s111_term_disabled: bool,
    pub sign_flip_applied: bool,
    pub guard_skipped: bool,
}

impl From<Flags> for FlagRecord {
    fn from(f: Flags) -> Self {
        Self {
            j_reduced_formula_used: f.j_reduced_formula_used,
            s111_term_disabled: f.s111_term_disabled,
            sign_flip_applied: f.sign_flip_applied,
            guard_skipped: f.guard_skipped,
        }
    }
}

impl PointRecord {
    pub fn new(index: usize, point: &GridPoint, outcome: PointOutcome) -> Self {
        let mut rec = PointRecord {
            index,
            point: point.into(),
            s: None,
            s1: None,
            s1bar: None,
            j: None,
            w: None,
            residuals: None,
            predicates: None,
            flags: None,
            label: outcome.label().as_str(),
            reason: None,
            outcome: outcome.clone(),
        };
        match &outcome {
            PointOutcome::Skipped { reason } => {
                rec.reason = Some(reason.clone());
                rec.flags = Some(
                    Flags {
                        guard_skipped: true,
                        ..Flags::default()
                    }
                    .into(),
                );
            }
            PointOutcome::Evaluated(report) => match report.as_ref() {
                PointReport::Tube(r) => {
                    rec.s = Some(r.s_chain.s.into());
                    rec.s1 = Some(r.s_chain.s1.into());
                    rec.j = r.j.map(Into::into);
                    rec.w = r.w.map(Into::into);
                    rec.residuals = Some(Residuals {
                        ma: r.residual_ma.into(),
                        monge: r.residual_monge.into(),
                        s1111: None,
                        polystruct: None,
                        reality: None,
                    });
                    rec.predicates = Some(r.predicates.into());
                    rec.flags = Some(r.flags.into());
                }
                PointReport::Rigid(r) => {
                    rec.s = Some(r.s_chain.s.into());
                    rec.s1 = Some(r.s_chain.s1.into());
                    rec.s1bar = Some(r.s1bar.into());
                    rec.j = r.j.map(Into::into);
                    rec.w = r.w.map(Into::into);
                    rec.residuals = Some(Residuals {
                        ma: r.residual_cma.into(),
                        monge: r.residual_cmonge.into(),
                        s1111: Some(r.residual_s1111),
                        polystruct: Some(r.residual_polystruct),
                        reality: Some(r.residual_reality),
                    });
                    rec.predicates = Some(r.predicates.into());
                    rec.flags = Some(r.flags.into());
                }
            },
        }
        rec
    }

    pub fn label(&self) -> Label {
        self.outcome.label()
    }
}

pub const POINT_CSV_TAIL: [&str; 21] = [
    "S_re",
    "S_im",
    "S1_re",
    "S1_im",
    "S1bar_re",
    "S1bar_im",
    "J_re",
    "J_im",
    "J_scaled",
    "W_re",
    "W_im",
    "W_scaled",
    "ma_raw",
    "ma_scaled",
    "monge_raw",
    "monge_scaled",
    "s1111",
    "polystruct",
    "reality",
    "label",
    "reason",
];

fn opt_num(n: Option<Num>) -> [String; 2] {
    n.map_or([String::new(), String::new()], Num::csv_cells)
}

fn opt_f(x: Option<f64>) -> String {
    x.map_or(String::new(), fmt_f64)
}

/// CSV rows of the per-point records, header first.
pub fn point_rows(records: &[PointRecord], rigid: bool) -> Vec<Vec<String>> {
    let coords: &[&str] = if rigid {
        &["z1_re", "z1_im", "z2_re", "z2_im"]
    } else {
        &["t1", "t2"]
    };
    let mut header = vec!["index".to_string()];
    header.extend(coords.iter().map(|s| s.to_string()));
    header.extend(POINT_CSV_TAIL.iter().map(|s| s.to_string()));
    let mut rows = vec![header];
    for r in records {
        let mut row = vec![r.index.to_string()];
        row.extend(r.point.csv_cells());
        row.extend(opt_num(r.s));
        row.extend(opt_num(r.s1));
        row.extend(opt_num(r.s1bar));
        for q in [r.j, r.w] {
            row.extend(opt_num(q.map(|q| q.value)));
            row.push(opt_f(q.map(|q| q.scaled)));
        }
        match r.residuals {
            Some(res) => {
                row.extend([res.ma.raw, res.ma.scaled, res.monge.raw, res.monge.scaled].map(fmt_f64));
                row.extend([res.s1111, res.polystruct, res.reality].map(opt_f));
            }
            None => row.extend(std::iter::repeat_n(String::new(), 7)),
        }
        row.push(r.label.to_string());
        row.push(r.reason.clone().unwrap_or_default());
        rows.push(row);
    }
    rows
}

/// Writes rows as CSV text.
pub fn write_csv(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
}
