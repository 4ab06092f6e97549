//! Functions to approximate.

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};

/// Built-in closed-form expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    /// `amp * sin(freq * t + phase)`
    Sin {
        #[serde(default = "one")]
        amp: f64,
        #[serde(default = "one")]
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Monomial coefficients `c0 + c1 t + c2 t^2 + ...`.
    Poly(Vec<f64>),
    Abs(Box<Expr>),
    Sum(Vec<Expr>),
    Const(f64),
}

fn one() -> f64 {
    1.0
}

impl Expr {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Sin { amp, freq, phase } => amp * (freq * t + phase).sin(),
            Expr::Poly(c) => c.iter().rev().fold(0.0, |acc, &c| acc * t + c),
            Expr::Abs(e) => e.eval(t).abs(),
            Expr::Sum(es) => es.iter().map(|e| e.eval(t)).sum(),
            Expr::Const(c) => *c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExprPiece {
    pub lo: f64,
    pub hi: f64,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// Piecewise-linear interpolation of samples.
    SampledPiecewiseLinear {
        ts: Vec<f64>,
        fs: Vec<f64>,
    },
    /// Finite point set: the sup-norm runs over the sample abscissae only.
    SampledPoints {
        ts: Vec<f64>,
        fs: Vec<f64>,
    },
    NamedExpressionPieces {
        pieces: Vec<ExprPiece>,
    },
}

/// A continuous function on `[lo, hi]`, or a finite point set inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetFunction {
    kind: TargetKind,
    lo: f64,
    hi: f64,
}

const JOIN_TOL: f64 = 1e-9;

impl TargetFunction {
    pub fn piecewise_linear(ts: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        check_samples(&ts, &fs)?;
        let (lo, hi) = (ts[0], ts[ts.len() - 1]);
        Ok(TargetFunction {
            kind: TargetKind::SampledPiecewiseLinear { ts, fs },
            lo,
            hi,
        })
    }

    pub fn points(ts: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        check_samples(&ts, &fs)?;
        let (lo, hi) = (ts[0], ts[ts.len() - 1]);
        Ok(TargetFunction {
            kind: TargetKind::SampledPoints { ts, fs },
            lo,
            hi,
        })
    }

    pub fn pieces(pieces: Vec<ExprPiece>) -> Result<Self> {
        let first = pieces
            .first()
            .ok_or_else(|| FkError::InvalidTarget("no expression pieces".into()))?;
        let lo = first.lo;
        let hi = pieces[pieces.len() - 1].hi;
        for (i, p) in pieces.iter().enumerate() {
            if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
                return Err(FkError::InvalidTarget(format!(
                    "piece {i} has an empty interval"
                )));
            }
        }
        for (i, w) in pieces.windows(2).enumerate() {
            if (w[0].hi - w[1].lo).abs() > JOIN_TOL * w[0].hi.abs().max(1.0) {
                return Err(FkError::InvalidTarget(format!(
                    "pieces {i} and {} are not contiguous",
                    i + 1
                )));
            }
            let (l, r) = (w[0].expr.eval(w[0].hi), w[1].expr.eval(w[1].lo));
            if (l - r).abs() > JOIN_TOL * l.abs().max(r.abs()).max(1.0) {
                return Err(FkError::InvalidTarget(format!(
                    "discontinuity between pieces {i} and {}: {l} vs {r}",
                    i + 1
                )));
            }
        }
        Ok(TargetFunction {
            kind: TargetKind::NamedExpressionPieces { pieces },
            lo,
            hi,
        })
    }

    pub fn kind(&self) -> &TargetKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Same function on the sub-interval `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= self.lo && hi <= self.hi && lo < hi) {
            return Err(FkError::InvalidArgument(format!(
                "[{lo}, {hi}] is not a sub-interval of [{}, {}]",
                self.lo, self.hi
            )));
        }
        if let TargetKind::SampledPoints { ts, .. } = &self.kind {
            if !ts.iter().any(|&t| t >= lo && t <= hi) {
                return Err(FkError::InvalidArgument(format!(
                    "no sample points in [{lo}, {hi}]"
                )));
            }
        }
        Ok(TargetFunction {
            kind: self.kind.clone(),
            lo,
            hi,
        })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, TargetKind::SampledPoints { .. })
    }

    /// Sample abscissae inside the domain, when the domain is a point set.
    pub fn sample_points(&self) -> Option<Vec<f64>> {
        match &self.kind {
            TargetKind::SampledPoints { ts, .. } => Some(
                ts.iter()
                    .copied()
                    .filter(|&t| t >= self.lo && t <= self.hi)
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Points strictly inside the domain where the function may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let inner = |t: &f64| *t > self.lo && *t < self.hi;
        match &self.kind {
            TargetKind::SampledPiecewiseLinear { ts, .. }
            | TargetKind::SampledPoints { ts, .. } => ts.iter().copied().filter(inner).collect(),
            TargetKind::NamedExpressionPieces { pieces } => {
                pieces.iter().map(|p| p.hi).filter(inner).collect()
            }
        }
    }

    /// Value at `t`. Point-set targets interpolate linearly between samples.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            TargetKind::SampledPiecewiseLinear { ts, fs }
            | TargetKind::SampledPoints { ts, fs } => {
                let i = ts.partition_point(|&x| x <= t);
                if i == 0 {
                    return fs[0];
                }
                if i >= ts.len() {
                    return fs[fs.len() - 1];
                }
                let (t0, t1) = (ts[i - 1], ts[i]);
                let w = (t - t0) / (t1 - t0);
                fs[i - 1] + w * (fs[i] - fs[i - 1])
            }
            TargetKind::NamedExpressionPieces { pieces } => {
                let i = pieces.partition_point(|p| p.hi < t).min(pieces.len() - 1);
                pieces[i].expr.eval(t)
            }
        }
    }

    /// Largest absolute value over a coarse scan; used for tolerance scaling.
    pub fn scale(&self) -> f64 {
        let n = 256;
        let mut s = 0.0_f64;
        for i in 0..=n {
            let t = self.lo + (self.hi - self.lo) * i as f64 / n as f64;
            s = s.max(self.eval(t).abs());
        }
        for t in self.breakpoints() {
            s = s.max(self.eval(t).abs());
        }
        s
    }
}

fn check_samples(ts: &[f64], fs: &[f64]) -> Result<()> {
    if ts.len() < 2 || ts.len() != fs.len() {
        return Err(FkError::InvalidTarget(format!(
            "need at least two (t, f) pairs of equal length, got {} and {}",
            ts.len(),
            fs.len()
        )));
    }
    if ts.iter().chain(fs).any(|v| !v.is_finite()) {
        return Err(FkError::InvalidTarget("non-finite sample".into()));
    }
    if ts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FkError::InvalidTarget(
            "sample abscissae must be strictly increasing".into(),
        ));
    }
    Ok(())
}
