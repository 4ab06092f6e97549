//! Inf-stationarity: the hull test on confined quasidifferentials, the alternating
//! extreme point characterization, and the classical alternation count.
//!
//! An interval `[xi_p, xi_q]` is stationary when `0 in co(S u C)` for every selection
//! `C` of one endpoint per unstable segment. For a fixed choice in the other
//! segments, the set of `delta` in a segment with `0 in co(S u C u {delta})` is
//! convex, so the endpoints cover the whole segment.

pub mod hull;

use serde::{Deserialize, Serialize};

use crate::deviation::{alternation_sequence, DeviationProfile};
use crate::error::{FkError, Result};
use crate::quasidiff::{confined_quasidiff, ParamVector};
use crate::spline::SplineModel;
use crate::transform::{build_transform, transformed_generators, TransformMatrices};

pub use hull::{generator_scale, min_norm_point, zero_in_hull, HullCertificate, HullVerdict};

/// Largest number of unstable segments whose endpoint selections are enumerated.
pub const MAX_SELECTION_SEGMENTS: usize = 20;
/// Default hull tolerance, relative to the generator scale.
pub const DEFAULT_HULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// One certificate per endpoint selection, in selection order.
    Certificates(Vec<HullCertificate>),
    /// A selection whose hull misses the origin. `selection[k]` is 0 or 1 for the
    /// left or right endpoint of segment `k`.
    FailingSelection {
        selection: Vec<u8>,
        direction: Vec<f64>,
        distance: f64,
    },
    /// No extreme point in the interval.
    Empty,
    /// Exact fit.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalVerdict {
    pub p: usize,
    pub q: usize,
    pub stationary: bool,
    pub evidence: Evidence,
}

/// Runs the selection test on generators `a` and segments `b`.
fn selection_test(
    p: usize,
    q: usize,
    a: &[ParamVector],
    b: &[(ParamVector, ParamVector)],
    rel_tol: f64,
) -> Result<IntervalVerdict> {
    if a.is_empty() && b.is_empty() {
        return Ok(IntervalVerdict {
            p,
            q,
            stationary: false,
            evidence: Evidence::Empty,
        });
    }
    if b.len() > MAX_SELECTION_SEGMENTS {
        return Err(FkError::TooManyUnstable {
            count: b.len(),
            limit: MAX_SELECTION_SEGMENTS,
        });
    }
    let mut all: Vec<ParamVector> = a.to_vec();
    for (u, v) in b {
        all.push(u.clone());
        all.push(v.clone());
    }
    let tol = rel_tol * generator_scale(&all).max(f64::MIN_POSITIVE);
    let mut certificates = Vec::new();
    for mask in 0..(1_u64 << b.len()) {
        let selection: Vec<u8> = (0..b.len()).map(|k| ((mask >> k) & 1) as u8).collect();
        let mut pts = a.to_vec();
        for (seg, &s) in b.iter().zip(&selection) {
            pts.push(if s == 0 { seg.0.clone() } else { seg.1.clone() });
        }
        match zero_in_hull(&pts, tol)? {
            HullVerdict::Inside(c) => certificates.push(c),
            HullVerdict::Outside {
                direction,
                distance,
            } => {
                return Ok(IntervalVerdict {
                    p,
                    q,
                    stationary: false,
                    evidence: Evidence::FailingSelection {
                        selection,
                        direction,
                        distance,
                    },
                })
            }
        }
    }
    Ok(IntervalVerdict {
        p,
        q,
        stationary: true,
        evidence: Evidence::Certificates(certificates),
    })
}

fn degenerate_verdict(p: usize, q: usize) -> IntervalVerdict {
    IntervalVerdict {
        p,
        q,
        stationary: true,
        evidence: Evidence::Degenerate,
    }
}

/// Stationarity of a block-aligned interval, tested on the transformed and projected
/// generators. `rel_tol` is relative to the generator scale.
pub fn interval_stationary(
    model: &SplineModel,
    profile: &DeviationProfile,
    mats: &TransformMatrices,
    p: usize,
    q: usize,
    rel_tol: f64,
) -> Result<IntervalVerdict> {
    if !mats.structure.is_aligned(p, q) {
        return Err(FkError::NotBlockAligned { p, q });
    }
    if profile.degenerate {
        return Ok(degenerate_verdict(p, q));
    }
    let g = transformed_generators(model, profile, mats, p, q)?;
    selection_test(p, q, &g.a, &g.b, rel_tol)
}

/// The same selection test on the untransformed generators; any `0 <= p < q <= N`.
pub fn raw_interval_stationary(
    model: &SplineModel,
    profile: &DeviationProfile,
    p: usize,
    q: usize,
    rel_tol: f64,
) -> Result<IntervalVerdict> {
    if profile.degenerate {
        return Ok(degenerate_verdict(p, q));
    }
    let qd = confined_quasidiff(model, profile, p, q)?;
    selection_test(p, q, &qd.s_points, &qd.u_segments, rel_tol)
}

/// Inclusion `-sup ⊂ sub` for the confined quasidifferential, checked vertex by vertex
/// of `sup` against the hull of the expanded subdifferential.
pub fn raw_inclusion(
    model: &SplineModel,
    profile: &DeviationProfile,
    p: usize,
    q: usize,
    rel_tol: f64,
) -> Result<bool> {
    if profile.degenerate {
        return Ok(true);
    }
    let qd = confined_quasidiff(model, profile, p, q)?;
    if qd.is_empty() {
        return Ok(false);
    }
    let dim = model.num_params();
    let sup_vertices = if qd.sup.segments.is_empty() {
        vec![vec![0.0; dim]]
    } else {
        qd.sup.vertices()
    };
    let sub_points = if qd.sub.points.is_empty() {
        vec![vec![0.0; dim]]
    } else {
        qd.sub.points.clone()
    };
    let scale = generator_scale(&sub_points).max(generator_scale(&sup_vertices));
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    for b in &sup_vertices {
        let shifted: Vec<ParamVector> = sub_points
            .iter()
            .map(|s| s.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        if !zero_in_hull(&shifted, tol)?.is_inside() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First stationary block-aligned interval, shortest first.
///
/// Stationarity passes to enclosing intervals, and every interval lies in a
/// block-aligned one, so this scan finds a stationary interval whenever one exists.
pub fn find_stationary_interval(
    model: &SplineModel,
    profile: &DeviationProfile,
    mats: &TransformMatrices,
    rel_tol: f64,
) -> Result<Option<IntervalVerdict>> {
    if profile.degenerate {
        return Ok(Some(degenerate_verdict(0, model.num_pieces())));
    }
    for (p, q) in mats.structure.aligned_intervals() {
        let v = interval_stationary(model, profile, mats, p, q, rel_tol)?;
        if v.stationary {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationVerdict {
    pub p: usize,
    pub q: usize,
    /// `m (q - p) + 2 + l`, `l` the non-neutral knots strictly inside.
    pub required: usize,
    pub found: usize,
    pub passes: bool,
}

/// Alternation count on `[xi_p, xi_q]` against `m (q - p) + 2 + l`.
pub fn characterization_check(
    model: &SplineModel,
    profile: &DeviationProfile,
    p: usize,
    q: usize,
    tau_zero: f64,
) -> Result<CharacterizationVerdict> {
    let l = model
        .classify_knots(tau_zero)
        .iter()
        .filter(|c| c.knot_index > p && c.knot_index < q && !c.is_neutral())
        .count();
    let required = model.degree() * (q - p) + 2 + l;
    let found = alternation_sequence(profile, p, q, true)?.count;
    Ok(CharacterizationVerdict {
        p,
        q,
        required,
        found,
        passes: profile.degenerate || found >= required,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Verdict {
    /// The passing interval, or the one closest to passing.
    pub interval: (usize, usize),
    /// `q - p + m + 1 + sum of multiplicities of the knots strictly inside`.
    pub required: usize,
    pub found: usize,
    pub passes: bool,
}

/// The classical alternation condition, over every knot interval.
pub fn theorem1_check(
    model: &SplineModel,
    profile: &DeviationProfile,
    tau_zero: f64,
) -> Result<Theorem1Verdict> {
    let n = model.num_pieces();
    let m = model.degree();
    let mut best: Option<(i64, Theorem1Verdict)> = None;
    for p in 0..n {
        for q in p + 1..=n {
            let mult: usize = (p + 1..q)
                .map(|i| model.knot_multiplicity(i, tau_zero))
                .sum();
            let required = q - p + m + 1 + mult;
            let found = alternation_sequence(profile, p, q, false)?.count;
            let surplus = found as i64 - required as i64;
            let v = Theorem1Verdict {
                interval: (p, q),
                required,
                found,
                passes: profile.degenerate || found >= required,
            };
            // Larger surplus wins, then the wider interval.
            let better = match &best {
                None => true,
                Some((s, b)) => {
                    surplus > *s || (surplus == *s && q - p > b.interval.1 - b.interval.0)
                }
            };
            if better {
                best = Some((surplus, v));
            }
        }
    }
    Ok(best.expect("at least one knot interval").1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub p: usize,
    pub q: usize,
    pub block_aligned: bool,
    /// Hull test; run on block-aligned intervals only.
    pub hull: Option<IntervalVerdict>,
    pub alternation: CharacterizationVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub per_interval: Vec<IntervalReport>,
    pub blocks: Vec<(usize, usize)>,
    /// Some block-aligned interval passes the hull test.
    pub inf_stationary: bool,
    /// Some knot interval has enough alternating extreme points.
    pub alternation_stationary: bool,
    /// The two verdicts above agree.
    pub consistent: bool,
    pub stationary_interval: Option<(usize, usize)>,
    pub theorem1: Theorem1Verdict,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    pub hull_tol: f64,
    /// Defaults to the model's own threshold.
    pub tau_zero: Option<f64>,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            hull_tol: DEFAULT_HULL_TOL,
            tau_zero: None,
        }
    }
}

/// Runs every test on every knot interval, ordered by `(q - p, p)`.
pub fn analyze(
    model: &SplineModel,
    profile: &DeviationProfile,
    settings: &AnalysisSettings,
) -> Result<StationarityReport> {
    let tau = settings
        .tau_zero
        .unwrap_or_else(|| model.default_tau_zero());
    let classes = model.classify_knots(tau);
    let mats = build_transform(model, &classes)?;
    let n = model.num_pieces();
    let mut intervals: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..=n).map(move |q| (p, q)))
        .collect();
    intervals.sort_by_key(|&(p, q)| (q - p, p));

    let mut per_interval = Vec::with_capacity(intervals.len());
    for (p, q) in intervals {
        let aligned = mats.structure.is_aligned(p, q);
        let hull = if aligned {
            Some(interval_stationary(
                model,
                profile,
                &mats,
                p,
                q,
                settings.hull_tol,
            )?)
        } else {
            None
        };
        per_interval.push(IntervalReport {
            p,
            q,
            block_aligned: aligned,
            hull,
            alternation: characterization_check(model, profile, p, q, tau)?,
        });
    }
    let stationary_interval = per_interval
        .iter()
        .filter_map(|r| r.hull.as_ref())
        .find(|h| h.stationary)
        .map(|h| (h.p, h.q));
    let inf_stationary = stationary_interval.is_some();
    let alternation_stationary = per_interval.iter().any(|r| r.alternation.passes);
    Ok(StationarityReport {
        blocks: mats.structure.blocks.clone(),
        inf_stationary,
        alternation_stationary,
        consistent: inf_stationary == alternation_stationary,
        stationary_interval,
        theorem1: theorem1_check(model, profile, tau)?,
        degenerate: profile.degenerate,
        per_interval,
    })
}
