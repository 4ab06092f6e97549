//! Sup-norm deviation, extreme points and alternating sequences.

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::spline::{KnotClass, KnotKind, SplineModel};
use crate::target::TargetFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Smooth,
    NeutralKnot,
    MaxKnot,
    MinKnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    NotApplicable,
}

impl Stability {
    /// Stable: max-knot with positive deviation or min-knot with negative deviation.
    /// Unstable: the two crossed cases.
    pub fn of(location: Location, sign: i8) -> Stability {
        match (location, sign > 0) {
            (Location::MaxKnot, true) | (Location::MinKnot, false) => Stability::Stable,
            (Location::MaxKnot, false) | (Location::MinKnot, true) => Stability::Unstable,
            _ => Stability::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremePoint {
    pub t: f64,
    /// Signed deviation `s(t) - f(t)`.
    pub deviation: f64,
    /// `+1` for points of `K+`, `-1` for `K-`.
    pub sign: i8,
    pub location: Location,
    pub stability: Stability,
    /// Internal knot index when the point is an internal knot.
    pub knot_index: Option<usize>,
}

impl ExtremePoint {
    pub fn sigma(&self) -> f64 {
        f64::from(self.sign)
    }

    pub fn is_unstable(&self) -> bool {
        self.stability == Stability::Unstable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationProfile {
    pub psi: f64,
    pub extremes: Vec<ExtremePoint>,
    /// Knots `xi_0..=xi_N` of the model the profile was computed for.
    pub knots: Vec<f64>,
    pub grid_resolution: usize,
    pub tol_extreme: f64,
    /// Exact fit; only the endpoints are reported as extremes.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSettings {
    pub grid_n: usize,
    /// Defaults to `1e-8 * max(1, psi)`.
    pub tol_extreme: Option<f64>,
    /// Defaults to [`SplineModel::default_tau_zero`].
    pub tau_zero: Option<f64>,
}

impl ProfileSettings {
    pub fn for_model(model: &SplineModel) -> Self {
        ProfileSettings {
            grid_n: min_grid(model).max(2000),
            tol_extreme: None,
            tau_zero: None,
        }
    }
}

/// Smallest admissible scan grid, `10 (m+1) N`.
pub fn min_grid(model: &SplineModel) -> usize {
    10 * model.num_params()
}

/// Distance below which two extreme points are the same point.
pub const MERGE_TOL: f64 = 1e-9;
const REFINE_TOL: f64 = 1e-12;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Local maxima of `|dev|` on `[lo, hi]`: a uniform scan with `grid_n` cells plus the
/// `special` points, each bracketing triple refined by golden-section search. Special
/// points are always returned as candidates and split the refinement brackets.
pub(crate) fn local_maxima<F: Fn(f64) -> f64>(
    dev: F,
    lo: f64,
    hi: f64,
    special: &[f64],
    grid_n: usize,
) -> Result<Vec<(f64, f64)>> {
    let grid_n = grid_n.max(2);
    let mut pts: Vec<(f64, bool)> = (0..=grid_n)
        .map(|i| (lo + (hi - lo) * i as f64 / grid_n as f64, false))
        .collect();
    pts.last_mut().unwrap().0 = hi;
    pts.extend(
        special
            .iter()
            .filter(|&&t| t >= lo && t <= hi)
            .map(|&t| (t, true)),
    );
    pts.push((lo, true));
    pts.push((hi, true));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    // Keep one entry per abscissa, preferring the special flag.
    pts.dedup_by(|next, kept| next.0 == kept.0);

    let vals: Vec<f64> = pts.iter().map(|&(t, _)| dev(t)).collect();
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(FkError::NonFinite(pts[i].0));
    }
    let n = pts.len();
    let mut out: Vec<(f64, f64)> = pts
        .iter()
        .zip(&vals)
        .filter(|((_, s), _)| *s)
        .map(|((t, _), v)| (*t, *v))
        .collect();
    for i in 0..n {
        let a = vals[i].abs();
        let left_ok = i == 0 || a >= vals[i - 1].abs();
        let right_ok = i + 1 == n || a >= vals[i + 1].abs();
        if !(left_ok && right_ok) {
            continue;
        }
        out.push((pts[i].0, vals[i]));
        let l = pts[i.saturating_sub(1)].0;
        let r = pts[(i + 1).min(n - 1)].0;
        let brackets: Vec<(f64, f64)> = if pts[i].1 {
            vec![(l, pts[i].0), (pts[i].0, r)]
        } else {
            vec![(l, r)]
        };
        for (bl, br) in brackets {
            if br > bl {
                let t = golden_max(|t| dev(t).abs(), bl, br);
                out.push((t, dev(t)));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

fn golden_max<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64) -> f64 {
    let tol = REFINE_TOL * a.abs().max(b.abs()).max(1.0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    // The bracket ends may beat the interior probes at a kink.
    let mid = 0.5 * (a + b);
    [a, mid, b]
        .into_iter()
        .max_by(|x, y| g(*x).total_cmp(&g(*y)))
        .unwrap()
}

/// Every refined local maximum of `|s - f|` as `(t, s(t) - f(t))`, sorted by `t`,
/// including knots, target breakpoints and the endpoints.
pub fn deviation_local_maxima(
    model: &SplineModel,
    target: &TargetFunction,
    grid_n: usize,
) -> Result<Vec<(f64, f64)>> {
    let dev = |t: f64| model.eval_unchecked(t) - target.eval(t);
    if let Some(ts) = target.sample_points() {
        return Ok(ts.into_iter().map(|t| (t, dev(t))).collect());
    }
    let (lo, hi) = model.domain();
    let mut special: Vec<f64> = model.internal_knots().to_vec();
    special.extend(target.breakpoints());
    local_maxima(dev, lo, hi, &special, grid_n)
}

/// Computes `Psi = sup |s - f|` and the classified extreme points.
pub fn deviation_profile(
    model: &SplineModel,
    target: &TargetFunction,
    settings: &ProfileSettings,
) -> Result<DeviationProfile> {
    let (lo, hi) = model.domain();
    let (flo, fhi) = target.domain();
    let scale = lo.abs().max(hi.abs()).max(1.0);
    if (lo - flo).abs() > 1e-12 * scale || (hi - fhi).abs() > 1e-12 * scale {
        return Err(FkError::InvalidArgument(format!(
            "model domain [{lo}, {hi}] differs from target domain [{flo}, {fhi}]"
        )));
    }
    let dev = |t: f64| model.eval_unchecked(t) - target.eval(t);
    let knots = model.all_knots();

    let candidates: Vec<(f64, f64)> = match target.sample_points() {
        Some(ts) => ts.into_iter().map(|t| (t, dev(t))).collect(),
        None => {
            if settings.grid_n < min_grid(model) {
                return Err(FkError::InvalidArgument(format!(
                    "grid_n = {} is below 10 (m+1) N = {}",
                    settings.grid_n,
                    min_grid(model)
                )));
            }
            let mut special: Vec<f64> = model.internal_knots().to_vec();
            special.extend(target.breakpoints());
            local_maxima(dev, lo, hi, &special, settings.grid_n)?
        }
    };
    if candidates.is_empty() {
        return Err(FkError::InvalidArgument("empty domain".into()));
    }
    if let Some(&(t, _)) = candidates.iter().find(|(_, d)| !d.is_finite()) {
        return Err(FkError::NonFinite(t));
    }

    let psi = candidates
        .iter()
        .fold(0.0_f64, |acc, (_, d)| acc.max(d.abs()));
    let fit_scale = target.scale().max(1.0);
    let tau_zero = settings
        .tau_zero
        .unwrap_or_else(|| model.default_tau_zero());
    let classes = model.classify_knots(tau_zero);

    if psi <= 1e-13 * fit_scale {
        let extremes = [lo, hi]
            .into_iter()
            .map(|t| ExtremePoint {
                t,
                deviation: dev(t),
                sign: 1,
                location: Location::Smooth,
                stability: Stability::NotApplicable,
                knot_index: None,
            })
            .collect();
        return Ok(DeviationProfile {
            psi,
            extremes,
            knots,
            grid_resolution: settings.grid_n,
            tol_extreme: settings.tol_extreme.unwrap_or(1e-8),
            degenerate: true,
        });
    }

    let tol = settings.tol_extreme.unwrap_or(1e-8 * psi.max(1.0));
    if tol <= 0.0 {
        return Err(FkError::InvalidArgument(
            "tol_extreme must be positive".into(),
        ));
    }
    let mut near: Vec<(f64, f64)> = candidates
        .into_iter()
        .filter(|(_, d)| d.abs() >= psi - tol)
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));

    let is_knot = |t: f64| model.internal_knots().iter().position(|&k| k == t);
    let mut clusters: Vec<Vec<(f64, f64)>> = Vec::new();
    let discrete = target.is_discrete();
    // Two near-maximal points belong to one hump when the deviation stays in the
    // tolerance band, with the same sign, halfway between them.
    let same_hump = |a: (f64, f64), b: (f64, f64)| {
        if b.0 - a.0 < MERGE_TOL {
            return true;
        }
        if discrete || a.1.signum() != b.1.signum() {
            return false;
        }
        let mid = dev(0.5 * (a.0 + b.0));
        mid.signum() == a.1.signum() && mid.abs() >= psi - tol
    };
    for c in near {
        match clusters.last_mut() {
            Some(cl) if same_hump(*cl.last().unwrap(), c) => cl.push(c),
            _ => clusters.push(vec![c]),
        }
    }
    // A flat run is represented by the special points it contains, a hump by its top.
    let breaks = target.breakpoints();
    let special = |t: f64| is_knot(t).is_some() || t == lo || t == hi || breaks.contains(&t);
    let extremes = clusters
        .into_iter()
        .flat_map(|cl| {
            let mut reps: Vec<(f64, f64)> =
                cl.iter().filter(|(t, _)| special(*t)).copied().collect();
            reps.dedup_by(|b, a| b.0 - a.0 < MERGE_TOL);
            if reps.is_empty() {
                reps.push(
                    *cl.iter()
                        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                        .unwrap(),
                );
            }
            reps
        })
        .map(|(t, d)| classify_point(t, d, &classes, is_knot(t)))
        .collect();

    Ok(DeviationProfile {
        psi,
        extremes,
        knots,
        grid_resolution: settings.grid_n,
        tol_extreme: tol,
        degenerate: false,
    })
}

fn classify_point(t: f64, d: f64, classes: &[KnotClass], knot_pos: Option<usize>) -> ExtremePoint {
    let sign = if d >= 0.0 { 1 } else { -1 };
    let (location, knot_index) = match knot_pos {
        Some(pos) => {
            let class = classes[pos];
            let loc = match class.kind {
                KnotKind::Neutral => Location::NeutralKnot,
                KnotKind::MaxKnot => Location::MaxKnot,
                KnotKind::MinKnot => Location::MinKnot,
            };
            (loc, Some(class.knot_index))
        }
        None => (Location::Smooth, None),
    };
    ExtremePoint {
        t,
        deviation: d,
        sign,
        location,
        stability: Stability::of(location, sign),
        knot_index,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alternation {
    pub count: usize,
    pub sequence: Vec<ExtremePoint>,
}

/// Extreme points of the profile lying in `[xi_p, xi_q]`.
pub fn extremes_in(
    profile: &DeviationProfile,
    p: usize,
    q: usize,
) -> impl Iterator<Item = &ExtremePoint> {
    let (lo, hi) = (profile.knots[p], profile.knots[q]);
    profile
        .extremes
        .iter()
        .filter(move |e| e.t >= lo && e.t <= hi)
}

/// Longest strictly alternating subsequence of the extremes in `[xi_p, xi_q]`.
///
/// With `endpoint_rule`, an unstable knot sitting exactly at `xi_p` or `xi_q` is not
/// admitted. Unstable internal knots are always admitted.
pub fn alternation_sequence(
    profile: &DeviationProfile,
    p: usize,
    q: usize,
    endpoint_rule: bool,
) -> Result<Alternation> {
    if p >= q || q >= profile.knots.len() {
        return Err(FkError::InvalidArgument(format!(
            "interval ({p}, {q}) needs 0 <= p < q <= {}",
            profile.knots.len() - 1
        )));
    }
    let admitted = extremes_in(profile, p, q).filter(|e| {
        !(endpoint_rule && e.is_unstable() && (e.knot_index == Some(p) || e.knot_index == Some(q)))
    });
    // Within each run of equal signs keep the largest deviation.
    let mut sequence: Vec<ExtremePoint> = Vec::new();
    for e in admitted {
        match sequence.last_mut() {
            Some(last) if last.sign == e.sign => {
                if e.deviation.abs() > last.deviation.abs() {
                    *last = e.clone();
                }
            }
            _ => sequence.push(e.clone()),
        }
    }
    Ok(Alternation {
        count: sequence.len(),
        sequence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::target::{Expr, ExprPiece};

    fn abs_cubed() -> SplineModel {
        SplineModel::new(
            3,
            -2.0,
            2.0,
            vec![0.0],
            8.0,
            vec![vec![-1.0, 6.0, -12.0], vec![2.0, 0.0, 0.0]],
        )
        .unwrap()
    }

    fn example1_points() -> (Vec<f64>, Vec<f64>) {
        (
            vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
            vec![7.0, 2.0, -0.875, 1.0, -0.875, 2.0, 7.0],
        )
    }

    #[test]
    fn example1_on_the_sample_points() {
        let (ts, fs) = example1_points();
        let f = TargetFunction::points(ts.clone(), fs).unwrap();
        let s = abs_cubed();
        let prof = deviation_profile(&s, &f, &ProfileSettings::for_model(&s)).unwrap();
        assert!((prof.psi - 1.0).abs() < 1e-12);
        let got: Vec<f64> = prof.extremes.iter().map(|e| e.t).collect();
        assert_eq!(got, ts);
        let signs: Vec<i8> = prof.extremes.iter().map(|e| e.sign).collect();
        assert_eq!(signs, vec![1, -1, 1, -1, 1, -1, 1]);
        assert_eq!(prof.extremes[3].location, Location::NeutralKnot);
        assert_eq!(alternation_sequence(&prof, 0, 2, true).unwrap().count, 7);
        assert_eq!(alternation_sequence(&prof, 0, 1, true).unwrap().count, 4);
    }

    #[test]
    fn example1_on_the_interpolant_exceeds_one() {
        // Between the samples -2 and -1 the deviation -t^3 + 5t + 3 reaches
        // 3 - (10/3) sqrt(5/3) at t = -sqrt(5/3).
        let (ts, fs) = example1_points();
        let f = TargetFunction::piecewise_linear(ts, fs).unwrap();
        let s = abs_cubed();
        let prof = deviation_profile(&s, &f, &ProfileSettings::for_model(&s)).unwrap();
        let expected = (10.0 / 3.0) * (5.0_f64 / 3.0).sqrt() - 3.0;
        assert!((prof.psi - expected).abs() < 1e-10, "psi = {}", prof.psi);
        assert_eq!(prof.extremes.len(), 2);
        assert!((prof.extremes[0].t + (5.0_f64 / 3.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn best_constant_for_sine() {
        let f = TargetFunction::pieces(vec![ExprPiece {
            lo: 0.0,
            hi: PI,
            expr: Expr::Sin {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
        }])
        .unwrap();
        let s = SplineModel::constant(1, 0.0, PI, 1, 0.5).unwrap();
        let prof = deviation_profile(&s, &f, &ProfileSettings::for_model(&s)).unwrap();
        assert!((prof.psi - 0.5).abs() < 1e-12);
        let ts: Vec<f64> = prof.extremes.iter().map(|e| e.t).collect();
        assert_eq!(ts.len(), 3, "{:?}", prof.extremes);
        assert!((ts[1] - PI / 2.0).abs() < 1e-6);
        let signs: Vec<i8> = prof.extremes.iter().map(|e| e.sign).collect();
        assert_eq!(signs, vec![1, -1, 1]);
    }

    #[test]
    fn exact_fit_is_degenerate() {
        let f = TargetFunction::pieces(vec![ExprPiece {
            lo: 0.0,
            hi: 1.0,
            expr: Expr::Poly(vec![0.25, 0.0]),
        }])
        .unwrap();
        let s = SplineModel::constant(1, 0.0, 1.0, 2, 0.25).unwrap();
        let prof = deviation_profile(&s, &f, &ProfileSettings::for_model(&s)).unwrap();
        assert!(prof.degenerate);
        assert_eq!(prof.psi, 0.0);
        assert_eq!(prof.extremes.len(), 2);
    }

    #[test]
    fn coarse_grid_rejected() {
        let f = TargetFunction::piecewise_linear(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let s = SplineModel::constant(1, 0.0, 1.0, 2, 0.0).unwrap();
        let settings = ProfileSettings {
            grid_n: 5,
            tol_extreme: None,
            tau_zero: None,
        };
        assert!(deviation_profile(&s, &f, &settings).is_err());
    }

    #[test]
    fn stability_truth_table() {
        use Location::*;
        assert_eq!(Stability::of(MaxKnot, 1), Stability::Stable);
        assert_eq!(Stability::of(MinKnot, -1), Stability::Stable);
        assert_eq!(Stability::of(MaxKnot, -1), Stability::Unstable);
        assert_eq!(Stability::of(MinKnot, 1), Stability::Unstable);
        for s in [1, -1] {
            assert_eq!(Stability::of(Smooth, s), Stability::NotApplicable);
            assert_eq!(Stability::of(NeutralKnot, s), Stability::NotApplicable);
        }
    }

    #[test]
    fn repeated_signs_collapse() {
        let mk = |t: f64, sign: i8| ExtremePoint {
            t,
            deviation: f64::from(sign),
            sign,
            location: Location::Smooth,
            stability: Stability::NotApplicable,
            knot_index: None,
        };
        let prof = DeviationProfile {
            psi: 1.0,
            extremes: vec![mk(0.1, 1), mk(0.5, 1), mk(0.9, -1)],
            knots: vec![0.0, 1.0],
            grid_resolution: 100,
            tol_extreme: 1e-8,
            degenerate: false,
        };
        assert_eq!(alternation_sequence(&prof, 0, 1, true).unwrap().count, 2);
        assert!(alternation_sequence(&prof, 1, 1, true).is_err());
    }
}
