//! The report written to `report.json`, and the CSV plot data.

use std::fmt::Write as _;

use fkcheb_core::{
    CharacterizationVerdict, DeviationProfile, FitResult, SplineModel, StationarityReport, Step1,
    TargetFunction, Theorem1Verdict,
};
use serde::{Deserialize, Serialize};

use crate::problem::Mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub psi: f64,
    pub extreme_count: usize,
    pub degenerate: bool,
    /// Some interval is stationary by the hull test.
    pub inf_stationary: bool,
    /// Some interval has enough alternating extreme points.
    pub alternation_stationary: bool,
    pub consistent: bool,
    pub stationary_interval: Option<(usize, usize)>,
    /// Alternation count over the whole domain.
    pub whole_domain: CharacterizationVerdict,
    pub theorem1: Theorem1Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Mode,
    pub degree: usize,
    pub pieces: usize,
    pub grid_n: usize,
    pub model: SplineModel,
    pub summary: Summary,
    pub profile: DeviationProfile,
    /// Per-interval verdicts and certificates; omitted in check mode.
    pub analysis: Option<StationarityReport>,
    pub fit: Option<FitResult>,
    pub heuristic: Option<Step1>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

/// Abscissae for the deviation plot: the samples of a finite target, a uniform grid
/// with the knots and breakpoints otherwise.
pub fn plot_points(model: &SplineModel, target: &TargetFunction, grid_n: usize) -> Vec<f64> {
    if let Some(ts) = target.sample_points() {
        return ts;
    }
    let (lo, hi) = model.domain();
    let mut ts: Vec<f64> = (0..=grid_n)
        .map(|i| {
            if i == grid_n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / grid_n as f64
            }
        })
        .collect();
    ts.extend_from_slice(model.internal_knots());
    ts.extend(target.breakpoints());
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

pub fn deviation_csv(model: &SplineModel, target: &TargetFunction, grid_n: usize) -> String {
    let mut out = String::from("t,f,s,s_minus_f\n");
    for t in plot_points(model, target, grid_n) {
        let f = target.eval(t);
        let s = model.eval_unchecked(t);
        writeln!(out, "{t},{f},{s},{}", s - f).unwrap();
    }
    out
}

pub fn extremes_csv(profile: &DeviationProfile) -> String {
    let mut out = String::from("t,deviation,sign,location,stability,knot_index\n");
    for e in &profile.extremes {
        let knot = e.knot_index.map(|k| k.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{knot}",
            e.t,
            e.deviation,
            e.sign,
            snake(&e.location),
            snake(&e.stability)
        )
        .unwrap();
    }
    out
}

fn snake<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}
