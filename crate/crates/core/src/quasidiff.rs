//! Gradients of the polynomial pieces and quasidifferentials of the deviation.
//!
//! A quasidifferential of `F` at `X` is a pair of convex compact sets
//! `[sub, sup]` with `F'(X; g) = max_{u in sub} <u, g> + min_{v in sup} <v, g>`.

use serde::{Deserialize, Serialize};

use crate::deviation::{DeviationProfile, ExtremePoint, Location, Stability};
use crate::error::{FkError, Result};
use crate::spline::{KnotClass, KnotKind, SplineModel};

/// Parameter-space vector `(a00, x_0, xi_1, x_1, ..., xi_{N-1}, x_{N-1})`.
pub type ParamVector = Vec<f64>;

/// Largest number of unstable segments for which the subdifferential is expanded
/// into its vertices.
pub const MAX_EXPANDED_UNSTABLE: usize = 12;

/// Gradient of the piece `P_l` (1-based) with respect to the parameter vector, at `t`.
///
/// `P_l` is the untruncated polynomial `a00 + sum_{i<l} sum_j a_ij (t - xi_i)^(m+1-j)`,
/// so the gradient is defined for every `t` in the domain, not only on piece `l`.
pub fn grad_piece(model: &SplineModel, l: usize, t: f64) -> Result<ParamVector> {
    let n = model.num_pieces();
    if l == 0 || l > n {
        return Err(FkError::IndexOutOfRange { index: l, max: n });
    }
    let (lo, hi) = model.domain();
    if !(t >= lo && t <= hi) {
        return Err(FkError::Domain { t, lo, hi });
    }
    let m = model.degree();
    let mut g = vec![0.0; model.num_params()];
    g[0] = 1.0;
    for i in 0..l {
        let base = i * (m + 1);
        let d = t - model.knot(i);
        let block = model.block(i);
        for j in 1..=m {
            g[base + j] = d.powi((m + 1 - j) as i32);
        }
        if i >= 1 {
            let mut mu = 0.0;
            for j in 1..=m {
                mu -= (m + 1 - j) as f64 * block[j - 1] * d.powi((m - j) as i32);
            }
            g[base] = mu;
        }
    }
    Ok(g)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scaled(v: &[f64], s: f64) -> ParamVector {
    v.iter().map(|x| x * s).collect()
}

/// Convex set `co(points) + sum_k [segments_k.0, segments_k.1]`. An empty point list
/// stands for `{0}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub points: Vec<ParamVector>,
    pub segments: Vec<(ParamVector, ParamVector)>,
}

impl GeneratorSet {
    pub fn zero() -> Self {
        GeneratorSet::default()
    }

    pub fn point(v: ParamVector) -> Self {
        GeneratorSet {
            points: vec![v],
            segments: Vec::new(),
        }
    }

    pub fn hull(points: Vec<ParamVector>) -> Self {
        GeneratorSet {
            points,
            segments: Vec::new(),
        }
    }

    /// `max_{u in set} <u, g>`.
    pub fn support_max(&self, g: &[f64]) -> f64 {
        let p = self
            .points
            .iter()
            .map(|v| dot(v, g))
            .fold(None, |acc: Option<f64>, x| {
                Some(acc.map_or(x, |a| a.max(x)))
            })
            .unwrap_or(0.0);
        p + self
            .segments
            .iter()
            .map(|(a, b)| dot(a, g).max(dot(b, g)))
            .sum::<f64>()
    }

    /// `min_{u in set} <u, g>`.
    pub fn support_min(&self, g: &[f64]) -> f64 {
        -self.negated().support_max(g)
    }

    pub fn negated(&self) -> GeneratorSet {
        GeneratorSet {
            points: self.points.iter().map(|v| scaled(v, -1.0)).collect(),
            segments: self
                .segments
                .iter()
                .map(|(a, b)| (scaled(a, -1.0), scaled(b, -1.0)))
                .collect(),
        }
    }

    /// All sums of one point and one endpoint per segment. Exponential in the number
    /// of segments.
    pub fn vertices(&self) -> Vec<ParamVector> {
        let dim = self
            .points
            .first()
            .or_else(|| self.segments.first().map(|s| &s.0))
            .map_or(0, Vec::len);
        let mut acc: Vec<ParamVector> = if self.points.is_empty() {
            vec![vec![0.0; dim]]
        } else {
            self.points.clone()
        };
        for (a, b) in &self.segments {
            acc = acc
                .iter()
                .flat_map(|v| {
                    [a, b]
                        .into_iter()
                        .map(move |e| v.iter().zip(e).map(|(x, y)| x + y).collect())
                })
                .collect();
        }
        acc
    }
}

/// The `beta` vectors attached to one extreme point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaEntry {
    pub t: f64,
    pub sign: i8,
    pub location: Location,
    pub stability: Stability,
    /// One vector for smooth and neutral points, the two branch vectors
    /// `sigma grad P_l`, `sigma grad P_{l+1}` for knots with a kink.
    pub vectors: Vec<ParamVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quasidifferential {
    pub sub: GeneratorSet,
    pub sup: GeneratorSet,
    pub beta_index: Vec<BetaEntry>,
    /// Signed gradients of smooth, neutral and stable extremes.
    pub s_points: Vec<ParamVector>,
    /// One segment per unstable extreme knot.
    pub u_segments: Vec<(ParamVector, ParamVector)>,
    /// Knot interval `(p, q)` the construction was confined to.
    pub interval: (usize, usize),
}

impl Quasidifferential {
    /// No extreme point contributed.
    pub fn is_empty(&self) -> bool {
        self.s_points.is_empty() && self.u_segments.is_empty()
    }

    /// `max(max_S <s, g>, max_U min_Delta <., g>)`, the closed form of
    /// `max_sub + min_sup` for this construction.
    pub fn directional_derivative_direct(&self, g: &[f64]) -> f64 {
        let s = self.s_points.iter().map(|v| dot(v, g));
        let u = self
            .u_segments
            .iter()
            .map(|(a, b)| dot(a, g).min(dot(b, g)));
        s.chain(u).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Quasidifferential of `psi_t(X) = s[X](t) - f(t)` at a fixed `t`.
///
/// Smooth points and neutral knots give `[grad P, {0}]`; a max-knot gives
/// `[co{grad P_l, grad P_l+1}, {0}]` and a min-knot `[{0}, co{grad P_l, grad P_l+1}]`.
pub fn point_quasidiff(
    model: &SplineModel,
    t: f64,
    class: Option<&KnotClass>,
) -> Result<(GeneratorSet, GeneratorSet)> {
    match class {
        None => {
            let l = model.piece_index(t).min(model.num_pieces());
            Ok((
                GeneratorSet::point(grad_piece(model, l, t)?),
                GeneratorSet::zero(),
            ))
        }
        Some(c) => {
            let l = c.knot_index;
            let left = grad_piece(model, l, t)?;
            match c.kind {
                KnotKind::Neutral => Ok((GeneratorSet::point(left), GeneratorSet::zero())),
                KnotKind::MaxKnot => Ok((
                    GeneratorSet::hull(vec![left, grad_piece(model, l + 1, t)?]),
                    GeneratorSet::zero(),
                )),
                KnotKind::MinKnot => Ok((
                    GeneratorSet::zero(),
                    GeneratorSet::hull(vec![left, grad_piece(model, l + 1, t)?]),
                )),
            }
        }
    }
}

/// Quasidifferential of `Psi` built from every extreme point.
pub fn objective_quasidiff(
    model: &SplineModel,
    profile: &DeviationProfile,
) -> Result<Quasidifferential> {
    confined_quasidiff(model, profile, 0, model.num_pieces())
}

/// Quasidifferential confined to `[xi_p, xi_q]`.
///
/// `S` holds the signed gradients of smooth, neutral and stable extremes in the closed
/// interval, `U` one segment per unstable knot strictly inside it. Unstable knots at
/// `xi_p` or `xi_q` are left out, and stable knots there contribute only the gradient
/// of the piece inside the interval.
pub fn confined_quasidiff(
    model: &SplineModel,
    profile: &DeviationProfile,
    p: usize,
    q: usize,
) -> Result<Quasidifferential> {
    let n = model.num_pieces();
    if p >= q || q > n {
        return Err(FkError::InvalidArgument(format!(
            "interval ({p}, {q}) needs 0 <= p < q <= {n}"
        )));
    }
    if profile.degenerate {
        return Err(FkError::PerfectFit);
    }
    if profile.knots.len() != n + 1 {
        return Err(FkError::DimensionMismatch {
            expected: n + 1,
            got: profile.knots.len(),
        });
    }
    let (lo, hi) = (model.knot(p), model.knot(q));
    let mut beta_index = Vec::new();
    let mut s_points = Vec::new();
    let mut u_segments = Vec::new();
    for e in profile.extremes.iter().filter(|e| e.t >= lo && e.t <= hi) {
        let entry = beta_entry(model, e, p, q)?;
        match (e.stability, entry.vectors.as_slice()) {
            (Stability::Unstable, [a, b]) => u_segments.push((a.clone(), b.clone())),
            (Stability::Unstable, _) => continue,
            _ => s_points.extend(entry.vectors.iter().cloned()),
        }
        beta_index.push(entry);
    }

    let sup = GeneratorSet {
        points: Vec::new(),
        segments: u_segments.clone(),
    };
    let sub = expand_sub(&s_points, &u_segments, model.num_params())?;
    Ok(Quasidifferential {
        sub,
        sup,
        beta_index,
        s_points,
        u_segments,
        interval: (p, q),
    })
}

fn beta_entry(model: &SplineModel, e: &ExtremePoint, p: usize, q: usize) -> Result<BetaEntry> {
    let sigma = e.sigma();
    let vectors = match (e.location, e.knot_index) {
        (Location::MaxKnot | Location::MinKnot, Some(l)) => {
            let at_left_end = l == p;
            let at_right_end = l == q;
            if e.stability == Stability::Unstable && (at_left_end || at_right_end) {
                Vec::new()
            } else if at_left_end {
                vec![scaled(&grad_piece(model, l + 1, e.t)?, sigma)]
            } else if at_right_end {
                vec![scaled(&grad_piece(model, l, e.t)?, sigma)]
            } else {
                vec![
                    scaled(&grad_piece(model, l, e.t)?, sigma),
                    scaled(&grad_piece(model, l + 1, e.t)?, sigma),
                ]
            }
        }
        (Location::NeutralKnot, Some(l)) => vec![scaled(&grad_piece(model, l, e.t)?, sigma)],
        _ => {
            let l = model.piece_index(e.t).min(model.num_pieces());
            vec![scaled(&grad_piece(model, l, e.t)?, sigma)]
        }
    };
    Ok(BetaEntry {
        t: e.t,
        sign: e.sign,
        location: e.location,
        stability: e.stability,
        vectors,
    })
}

/// Vertices of `co{ S - sum U, union_D ( - sum_{D' != D} D' ) }`.
fn expand_sub(
    s_points: &[ParamVector],
    u_segments: &[(ParamVector, ParamVector)],
    dim: usize,
) -> Result<GeneratorSet> {
    if u_segments.len() > MAX_EXPANDED_UNSTABLE {
        return Err(FkError::TooManyUnstable {
            count: u_segments.len(),
            limit: MAX_EXPANDED_UNSTABLE,
        });
    }
    if u_segments.is_empty() {
        return Ok(GeneratorSet::hull(s_points.to_vec()));
    }
    let neg: Vec<(ParamVector, ParamVector)> = u_segments
        .iter()
        .map(|(a, b)| (scaled(a, -1.0), scaled(b, -1.0)))
        .collect();
    let mut points = Vec::new();
    if !s_points.is_empty() {
        points.extend(
            GeneratorSet {
                points: s_points.to_vec(),
                segments: neg.clone(),
            }
            .vertices(),
        );
    }
    for k in 0..neg.len() {
        let others: Vec<_> = neg
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, s)| s.clone())
            .collect();
        let c = GeneratorSet {
            points: vec![vec![0.0; dim]],
            segments: others,
        };
        points.extend(c.vertices());
    }
    Ok(GeneratorSet::hull(points))
}

/// `max_{u in sub} <u, g> + min_{v in sup} <v, g>`.
pub fn directional_derivative(qd: &Quasidifferential, g: &[f64]) -> Result<f64> {
    let dim = qd
        .s_points
        .first()
        .or_else(|| qd.u_segments.first().map(|s| &s.0));
    if let Some(v) = dim {
        if v.len() != g.len() {
            return Err(FkError::DimensionMismatch {
                expected: v.len(),
                got: g.len(),
            });
        }
    }
    Ok(qd.sub.support_max(g) + qd.sup.support_min(g))
}
