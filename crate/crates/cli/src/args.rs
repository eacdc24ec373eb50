//! Command-line parsing into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crflat::catalog::{Expectation, Form};
use crflat::invariants::TolProfile;

use crate::{
    CheckArgs, Command, Format, GridArgs, OdeArgs, ParamArgs, RunConfig, SourceArg, UsageError,
};

#[derive(Debug, Parser)]
#[command(name = "crflat", version, about = "CR-flatness checks for tube and rigid hypersurfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: FormatArg,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormArg {
    Tube,
    Rigid,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExpectArg {
    Flat,
    Nonflat,
    Unknown,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Threshold on scaled |J| and |W|.
    #[arg(long)]
    pub tol_flat: Option<f64>,
    /// Threshold on |S1| and |S111| for the singular-term policy of J.
    #[arg(long)]
    pub tol_sing: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Result<TolProfile, UsageError> {
        let mut tol = TolProfile::default();
        for (name, value, slot) in [
            ("--tol-flat", self.tol_flat, &mut tol.flat),
            ("--tol-sing", self.tol_sing, &mut tol.sing),
        ] {
            if let Some(x) = value {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(UsageError::Invalid(format!("{name} must be positive")));
                }
                *slot = x;
            }
        }
        Ok(tol)
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Evaluate invariants of a family or expression over a grid.
    Check {
        #[arg(long, conflicts_with_all = ["form", "expr"], required_unless_present = "expr")]
        family: Option<String>,
        /// Family parameters as K=V; repeatable or comma separated.
        #[arg(long = "param", value_delimiter = ',', requires = "family")]
        params: Vec<String>,
        #[arg(long, value_enum, requires = "expr")]
        form: Option<FormArg>,
        /// Graphing function in t1, t2 (tube) or z1, z1b, z2, z2b (rigid).
        #[arg(long)]
        expr: Option<String>,
        /// Grid center, comma separated (2 values for tube, 4 for rigid).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid_center: Option<Vec<f64>>,
        #[arg(long)]
        grid_halfwidth: Option<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[command(flatten)]
        tol: TolArgs,
        /// Override the expectation used for the exit code.
        #[arg(long, value_enum)]
        expect: Option<ExpectArg>,
    },
    /// Run the (p, q) profile pipeline.
    Param {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Half-width of the t2 axis.
        #[arg(long, default_value_t = 0.1)]
        grid_w: f64,
        /// Half-width of the t1 axis.
        #[arg(long, default_value_t = 0.05)]
        grid_halfwidth: f64,
        #[arg(long, default_value_t = 3)]
        grid_n: usize,
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Sample count for profile validation and the first-curvature check.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Liouville and classical Monge residual tables.
    Ode {
        /// case1, case2, case3 or reinhardt.
        #[arg(long)]
        ode_family: Option<String>,
        /// Family parameters as K=V, comma separated.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Profile p(v) for the classical Monge table.
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// List the builtin families.
    Families,
}

/// Parses `K=V` pairs.
pub fn parse_params(items: &[String]) -> Result<Vec<(String, f64)>, UsageError> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| UsageError::Invalid(format!("parameter {s:?} is not K=V")))?;
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| UsageError::Invalid(format!("parameter {k} has bad value {v:?}")))?;
            Ok((k.trim().to_string(), x))
        })
        .collect()
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, UsageError> {
        let command = match self.command {
            Cmd::Check {
                family,
                params,
                form,
                expr,
                grid_center,
                grid_halfwidth,
                grid_n,
                order,
                tol,
                expect,
            } => {
                let source = match (family, expr) {
                    (Some(name), None) => SourceArg::Family {
                        name,
                        params: parse_params(&params)?,
                    },
                    (None, Some(text)) => SourceArg::Expr {
                        form: match form.unwrap_or(FormArg::Tube) {
                            FormArg::Tube => Form::Tube,
                            FormArg::Rigid => Form::Rigid,
                        },
                        text,
                    },
                    _ => {
                        return Err(UsageError::Invalid(
                            "give either --family or --expr".into(),
                        ))
                    }
                };
                Command::Check(CheckArgs {
                    source,
                    grid: GridArgs {
                        center: grid_center,
                        halfwidth: grid_halfwidth,
                        n: grid_n,
                    },
                    order,
                    tol: tol.resolve()?,
                    expect: expect.map(|e| match e {
                        ExpectArg::Flat => Expectation::Flat,
                        ExpectArg::Nonflat => Expectation::Nonflat,
                        ExpectArg::Unknown => Expectation::Unknown,
                    }),
                })
            }
            Cmd::Param {
                p,
                q,
                grid_w,
                grid_halfwidth,
                grid_n,
                order,
                samples,
                tol,
            } => {
                if !(grid_w >= 0.0 && grid_halfwidth >= 0.0) {
                    return Err(UsageError::Invalid("grid half-widths must be >= 0".into()));
                }
                Command::Param(ParamArgs {
                    p,
                    q,
                    grid_w,
                    grid_t: grid_halfwidth,
                    n: grid_n,
                    order,
                    samples,
                    tol: tol.resolve()?,
                })
            }
            Cmd::Ode {
                ode_family,
                params,
                p,
                samples,
            } => Command::Ode(OdeArgs {
                family: ode_family,
                params: parse_params(&params)?,
                p,
                samples,
            }),
            Cmd::Families => Command::Families,
        };
        Ok(RunConfig {
            command,
            format: match self.format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            },
            out: self.out,
        })
    }
}
