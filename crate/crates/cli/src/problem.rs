//! Problem files.

use std::fs;
use std::path::Path;

use fkcheb_core::{ExprPiece, SplineModel, TargetFunction};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MAX_GRID: usize = 1_000_000;
pub const MAX_DEGREE: usize = 8;
pub const MAX_PIECES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Full analysis of the given model, with certificates.
    Analyze,
    /// Best spline with the knots of the given model, or uniform knots.
    FitFixed,
    /// Two-step heuristic: breakpoints from a discontinuous fit, then a fixed-knot fit.
    FitHeuristic,
    /// Verdict summary for the given model.
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKindName {
    /// Linear interpolation of `(ts, fs)`.
    PiecewiseLinear,
    /// The finite point set `(ts, fs)`.
    Points,
    /// Contiguous named expressions.
    Pieces,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub kind: TargetKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<ExprPiece>>,
}

impl TargetSpec {
    pub fn build(&self) -> Result<TargetFunction, CliError> {
        let samples = || match (&self.ts, &self.fs) {
            (Some(ts), Some(fs)) => Ok((ts.clone(), fs.clone())),
            (None, _) => Err(field("target.ts", "missing")),
            (_, None) => Err(field("target.fs", "missing")),
        };
        let built = match self.kind {
            TargetKindName::PiecewiseLinear => {
                let (ts, fs) = samples()?;
                TargetFunction::piecewise_linear(ts, fs)
            }
            TargetKindName::Points => {
                let (ts, fs) = samples()?;
                TargetFunction::points(ts, fs)
            }
            TargetKindName::Pieces => {
                let pieces = self
                    .pieces
                    .clone()
                    .ok_or_else(|| field("target.pieces", "missing"))?;
                TargetFunction::pieces(pieces)
            }
        };
        built.map_err(|e| field("target", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub knots: Vec<f64>,
    pub a00: f64,
    pub blocks: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub tau_zero: Option<f64>,
    #[serde(default)]
    pub tol_extreme: Option<f64>,
    #[serde(default)]
    pub hull_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub target: TargetSpec,
    pub degree: usize,
    pub pieces: usize,
    #[serde(default)]
    pub initial_model: Option<ModelSpec>,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub mode: Mode,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub target: TargetFunction,
    pub degree: usize,
    pub pieces: usize,
    pub initial_model: Option<SplineModel>,
    pub grid_n: usize,
    pub tolerances: Tolerances,
    pub mode: Mode,
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{name}: {msg}"))
}

fn check_positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => {
            Err(field(name, format!("must be positive, got {x}")))
        }
        _ => Ok(()),
    }
}

/// Smallest accepted grid: ten points per parameter.
pub fn min_grid(degree: usize, pieces: usize) -> usize {
    10 * (degree + 1) * pieces
}

pub fn default_grid(degree: usize, pieces: usize) -> usize {
    min_grid(degree, pieces).max(2000)
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec, CliError> {
    validate(parse_problem_file(text)?)
}

/// Parses without validation, so that command-line overrides can be applied first.
pub fn parse_problem_file(text: &str) -> Result<ProblemFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Input(format!("schema: {inner}"))
        } else {
            field(&path, inner)
        }
    })
}

pub fn validate(file: ProblemFile) -> Result<ProblemSpec, CliError> {
    let target = file.target.build()?;
    if !(1..=MAX_DEGREE).contains(&file.degree) {
        return Err(field("degree", format!("must be in 1..={MAX_DEGREE}")));
    }
    if !(1..=MAX_PIECES).contains(&file.pieces) {
        return Err(field("pieces", format!("must be in 1..={MAX_PIECES}")));
    }
    let t = file.tolerances;
    check_positive("tolerances.tau_zero", t.tau_zero)?;
    check_positive("tolerances.tol_extreme", t.tol_extreme)?;
    check_positive("tolerances.hull_tol", t.hull_tol)?;
    let min = min_grid(file.degree, file.pieces);
    let grid_n = file
        .grid_n
        .unwrap_or_else(|| default_grid(file.degree, file.pieces));
    if !(min..=MAX_GRID).contains(&grid_n) {
        return Err(field("grid_n", format!("must be in {min}..={MAX_GRID}")));
    }
    let (lo, hi) = target.domain();
    let initial_model = match file.initial_model {
        None => None,
        Some(m) => {
            if m.knots.len() + 1 != file.pieces {
                return Err(field(
                    "initial_model.knots",
                    format!(
                        "{} internal knots for {} pieces",
                        m.knots.len(),
                        file.pieces
                    ),
                ));
            }
            if m.blocks.len() != file.pieces {
                return Err(field(
                    "initial_model.blocks",
                    format!("{} blocks for {} pieces", m.blocks.len(), file.pieces),
                ));
            }
            let model = SplineModel::new(file.degree, lo, hi, m.knots, m.a00, m.blocks)
                .map_err(|e| field("initial_model", e))?;
            let mut all = vec![lo];
            all.extend_from_slice(model.internal_knots());
            all.push(hi);
            if all.windows(2).any(|w| w[0] >= w[1]) {
                return Err(field(
                    "initial_model.knots",
                    "must be strictly increasing inside the target domain",
                ));
            }
            Some(model)
        }
    };
    if matches!(file.mode, Mode::Analyze | Mode::Check) && initial_model.is_none() {
        return Err(field(
            "initial_model",
            "required in analyze and check modes",
        ));
    }
    if file.mode == Mode::FitHeuristic && file.pieces < 2 {
        return Err(field("pieces", "the heuristic needs at least two pieces"));
    }
    Ok(ProblemSpec {
        target,
        degree: file.degree,
        pieces: file.pieces,
        initial_model,
        grid_n,
        tolerances: file.tolerances,
        mode: file.mode,
    })
}

pub fn read_problem_file(path: &Path) -> Result<ProblemFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_problem_file(&text)
}

pub fn load_problem(path: &Path) -> Result<ProblemSpec, CliError> {
    validate(read_problem_file(path)?)
}
