//! Pipeline: fit or take the model, profile, analyze, write artifacts.

use std::fs;
use std::path::Path;

use fkcheb_core::stationarity::DEFAULT_HULL_TOL;
use fkcheb_core::{
    analyze, best_fixed_knot_spline, best_polynomial, characterization_check, deviation_profile,
    meinardus_fit, AnalysisSettings, ProfileSettings, SplineModel,
};

use crate::problem::{Mode, ProblemSpec};
use crate::report::{deviation_csv, extremes_csv, Report, Summary};
use crate::CliError;

pub fn build_report(spec: &ProblemSpec) -> Result<Report, CliError> {
    let (lo, hi) = spec.target.domain();
    let (model, fit, heuristic) = match spec.mode {
        Mode::Analyze | Mode::Check => {
            let model = spec
                .initial_model
                .clone()
                .ok_or_else(|| CliError::Input("initial_model: required in this mode".into()))?;
            (model, None, None)
        }
        Mode::FitFixed => {
            let fit = if spec.pieces == 1 {
                best_polynomial(&spec.target, lo, hi, spec.degree, spec.grid_n)?
            } else {
                let knots: Vec<f64> = match &spec.initial_model {
                    Some(m) => m.internal_knots().to_vec(),
                    None => (1..spec.pieces)
                        .map(|i| lo + (hi - lo) * i as f64 / spec.pieces as f64)
                        .collect(),
                };
                best_fixed_knot_spline(&spec.target, &knots, spec.degree, spec.grid_n)?
            };
            (fit.model.clone(), Some(fit), None)
        }
        Mode::FitHeuristic => {
            let h = meinardus_fit(&spec.target, spec.degree, spec.pieces, spec.grid_n)?;
            (h.step2.model.clone(), Some(h.step2), Some(h.step1))
        }
    };
    analyze_model(spec, model, fit, heuristic)
}

fn analyze_model(
    spec: &ProblemSpec,
    model: SplineModel,
    fit: Option<fkcheb_core::FitResult>,
    heuristic: Option<fkcheb_core::Step1>,
) -> Result<Report, CliError> {
    let tol = spec.tolerances;
    let settings = ProfileSettings {
        grid_n: spec.grid_n,
        tol_extreme: tol.tol_extreme,
        tau_zero: tol.tau_zero,
    };
    let profile = deviation_profile(&model, &spec.target, &settings)?;
    let analysis_settings = AnalysisSettings {
        hull_tol: tol.hull_tol.unwrap_or(DEFAULT_HULL_TOL),
        tau_zero: tol.tau_zero,
    };
    let analysis = analyze(&model, &profile, &analysis_settings)?;
    let tau = tol.tau_zero.unwrap_or_else(|| model.default_tau_zero());
    let whole_domain = characterization_check(&model, &profile, 0, model.num_pieces(), tau)?;
    let summary = Summary {
        psi: profile.psi,
        extreme_count: profile.extremes.len(),
        degenerate: profile.degenerate,
        inf_stationary: analysis.inf_stationary,
        alternation_stationary: analysis.alternation_stationary,
        consistent: analysis.consistent,
        stationary_interval: analysis.stationary_interval,
        whole_domain,
        theorem1: analysis.theorem1.clone(),
    };
    Ok(Report {
        mode: spec.mode,
        degree: spec.degree,
        pieces: spec.pieces,
        grid_n: spec.grid_n,
        model,
        summary,
        profile,
        analysis: (spec.mode != Mode::Check).then_some(analysis),
        fit,
        heuristic,
    })
}

/// Runs the problem and writes `report.json`, `deviation.csv` and `extremes.csv`.
pub fn run(spec: &ProblemSpec, out_dir: &Path) -> Result<Report, CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Output(format!("{}: {e}", out_dir.display())))?;
    let report = build_report(spec)?;
    let write = |name: &str, body: String| {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
    };
    write("report.json", report.to_json())?;
    write(
        "deviation.csv",
        deviation_csv(&report.model, &spec.target, spec.grid_n),
    )?;
    write("extremes.csv", extremes_csv(&report.profile))?;
    Ok(report)
}
