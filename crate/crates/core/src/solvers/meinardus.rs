//! Two-step free-knot heuristic: balance the errors of a discontinuous piecewise
//! polynomial to place the breakpoints, then fit a continuous spline with those knots.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{best_fixed_knot_spline, fit_polynomial, FitResult};
use crate::error::{FkError, Result};
use crate::poly::Polynomial;
use crate::target::TargetFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    /// Minimax polynomial on the segment, about `lo`.
    pub poly: Polynomial,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step1 {
    /// Internal breakpoints.
    pub breakpoints: Vec<f64>,
    pub segments: Vec<Segment>,
    /// Largest segment error.
    pub level: f64,
    pub breakpoint_grid: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeinardusFit {
    pub step1: Step1,
    pub step2: FitResult,
}

/// Breakpoint grid used when none is given: fine for two pieces, where the search is
/// a scan, coarser for the dynamic program.
pub fn default_breakpoint_grid(n: usize) -> usize {
    if n == 2 {
        240
    } else {
        48
    }
}

pub fn meinardus_fit(
    f: &TargetFunction,
    m: usize,
    n: usize,
    grid_n: usize,
) -> Result<MeinardusFit> {
    meinardus_fit_with(f, m, n, grid_n, default_breakpoint_grid(n))
}

pub fn meinardus_fit_with(
    f: &TargetFunction,
    m: usize,
    n: usize,
    grid_n: usize,
    breakpoint_grid: usize,
) -> Result<MeinardusFit> {
    if n < 2 {
        return Err(FkError::InvalidArgument(
            "the heuristic needs at least two pieces".into(),
        ));
    }
    if breakpoint_grid < n {
        return Err(FkError::InvalidArgument(format!(
            "breakpoint grid {breakpoint_grid} cannot hold {n} pieces"
        )));
    }
    let (lo, hi) = f.domain();
    let seg_grid = grid_n.max(10 * (m + 1));
    let node = |i: usize| {
        if i == breakpoint_grid {
            hi
        } else {
            lo + (hi - lo) * i as f64 / breakpoint_grid as f64
        }
    };
    let err = |a: f64, b: f64| -> Result<f64> {
        Ok(fit_polynomial(&f.restrict(a, b)?, m, seg_grid)?.error)
    };

    let mut warnings = Vec::new();
    let breakpoints = if n == 2 {
        vec![two_piece_breakpoint(&err, &node, breakpoint_grid)?]
    } else {
        let idx = balanced_partition(&err, &node, breakpoint_grid, n)?;
        if idx.windows(2).any(|w| w[1] - w[0] == 1) {
            warnings.push(format!(
                "a segment spans a single cell of the {breakpoint_grid}-cell breakpoint grid; \
                 the grid may be too coarse"
            ));
        }
        idx[1..n].iter().map(|&i| node(i)).collect()
    };

    let mut ends = vec![lo];
    ends.extend_from_slice(&breakpoints);
    ends.push(hi);
    let mut segments = Vec::with_capacity(n);
    for w in ends.windows(2) {
        let fit = fit_polynomial(&f.restrict(w[0], w[1])?, m, seg_grid)?;
        if !fit.converged {
            warnings.push(format!("segment [{}, {}] fit did not converge", w[0], w[1]));
        }
        segments.push(Segment {
            lo: w[0],
            hi: w[1],
            poly: fit.poly,
            error: fit.error,
        });
    }
    let level = segments.iter().fold(0.0_f64, |a, s| a.max(s.error));
    let step2 = best_fixed_knot_spline(f, &breakpoints, m, grid_n)?;
    Ok(MeinardusFit {
        step1: Step1 {
            breakpoints,
            segments,
            level,
            breakpoint_grid,
            warnings,
        },
        step2,
    })
}

/// Breakpoint minimizing `max(e_left, e_right)`. The left error grows and the right
/// error shrinks as the breakpoint moves right, so after the grid scan the crossing
/// is located by bisection.
fn two_piece_breakpoint<E, N>(err: &E, node: &N, k: usize) -> Result<f64>
where
    E: Fn(f64, f64) -> Result<f64>,
    N: Fn(usize) -> f64,
{
    let (lo, hi) = (node(0), node(k));
    let gap = |b: f64| -> Result<(f64, f64)> { Ok((err(lo, b)?, err(b, hi)?)) };
    let mut best = (f64::INFINITY, 1, 0.0);
    let mut diffs = vec![0.0; k + 1];
    for i in 1..k {
        let (l, r) = gap(node(i))?;
        diffs[i] = l - r;
        if l.max(r) < best.0 {
            best = (l.max(r), i, l - r);
        }
    }
    let (_, i, d) = best;
    if d == 0.0 {
        return Ok(node(i));
    }
    // Neighbouring node on the other side of the crossing.
    let j = if d < 0.0 { i + 1 } else { i - 1 };
    if j == 0 || j == k || diffs[j].signum() == d.signum() {
        return Ok(node(i));
    }
    let (mut a, mut b) = if d < 0.0 {
        (node(i), node(j))
    } else {
        (node(j), node(i))
    };
    let mut best_b = node(i);
    let mut best_v = best.0;
    for _ in 0..80 {
        if b - a <= 1e-13 * (hi - lo) {
            break;
        }
        let mid = 0.5 * (a + b);
        let (l, r) = gap(mid)?;
        if l.max(r) < best_v {
            best_v = l.max(r);
            best_b = mid;
        }
        if l < r {
            a = mid;
        } else if l > r {
            b = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(best_b)
}

/// Grid indices `0 = i_0 < ... < i_n = k` minimizing the largest segment error.
fn balanced_partition<E, N>(err: &E, node: &N, k: usize, n: usize) -> Result<Vec<usize>>
where
    E: Fn(f64, f64) -> Result<f64>,
    N: Fn(usize) -> f64,
{
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut cost = |i: usize, j: usize| -> Result<f64> {
        if let Some(&c) = cache.get(&(i, j)) {
            return Ok(c);
        }
        let c = err(node(i), node(j))?;
        cache.insert((i, j), c);
        Ok(c)
    };
    // best[s][j]: optimal level covering nodes 0..=j with s segments.
    let mut best = vec![vec![f64::INFINITY; k + 1]; n + 1];
    let mut arg = vec![vec![0usize; k + 1]; n + 1];
    for j in 1..=k {
        best[1][j] = cost(0, j)?;
    }
    for s in 2..=n {
        for j in s..=k {
            if s == n && j != k {
                continue;
            }
            for i in s - 1..j {
                let prev = best[s - 1][i];
                if !prev.is_finite() || prev >= best[s][j] {
                    continue;
                }
                let v = prev.max(cost(i, j)?);
                if v < best[s][j] {
                    best[s][j] = v;
                    arg[s][j] = i;
                }
            }
        }
    }
    let mut idx = vec![k];
    let mut j = k;
    for s in (2..=n).rev() {
        j = arg[s][j];
        idx.push(j);
    }
    idx.push(0);
    idx.reverse();
    Ok(idx)
}
