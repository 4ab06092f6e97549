//! Reference minimax solvers: polynomials, fixed-knot continuous splines and the
//! two-step free-knot heuristic.

mod lp;
mod meinardus;
mod remez;

use serde::{Deserialize, Serialize};

use crate::deviation::{deviation_profile, min_grid, ExtremePoint, ProfileSettings};
use crate::error::{FkError, Result};
use crate::poly::Polynomial;
use crate::spline::SplineModel;
use crate::target::TargetFunction;

use lp::{exchange_fit, Basis};

pub use meinardus::{meinardus_fit, meinardus_fit_with, MeinardusFit, Segment, Step1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Remez,
    /// LP on a growing point set.
    LpExchange,
    /// LP on the sample points of a finite target.
    LpDiscrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: SplineModel,
    pub achieved_psi: f64,
    pub equioscillation: Vec<ExtremePoint>,
    pub iterations: usize,
    pub converged: bool,
    pub method: FitMethod,
}

struct PolyBasis {
    m: usize,
    lo: f64,
    width: f64,
}

impl Basis for PolyBasis {
    fn len(&self) -> usize {
        self.m + 1
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let u = (t - self.lo) / self.width;
        let mut pw = 1.0;
        for o in out.iter_mut() {
            *o = pw;
            pw *= u;
        }
    }
}

/// Columns `1`, then `(t - xi_i)_+^(m+1-j)` for every knot block `i` and `j = 1..m`,
/// in parameter order.
struct SplineBasis {
    m: usize,
    knots: Vec<f64>,
}

impl Basis for SplineBasis {
    fn len(&self) -> usize {
        1 + self.m * self.knots.len()
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        out[0] = 1.0;
        for (i, &k) in self.knots.iter().enumerate() {
            let d = t - k;
            for j in 1..=self.m {
                out[1 + i * self.m + j - 1] = if i > 0 && d < 0.0 {
                    0.0
                } else {
                    d.powi((self.m + 1 - j) as i32)
                };
            }
        }
    }
}

fn check_grid(grid_n: usize, need: usize) -> Result<()> {
    if grid_n < need {
        return Err(FkError::InvalidArgument(format!(
            "grid_n = {grid_n} is below the minimum {need}"
        )));
    }
    Ok(())
}

/// A minimax polynomial as a Taylor polynomial about `lo`.
pub(crate) struct PolyFit {
    pub poly: Polynomial,
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: FitMethod,
}

pub(crate) fn fit_polynomial(g: &TargetFunction, m: usize, grid_n: usize) -> Result<PolyFit> {
    let (lo, hi) = g.domain();
    let width = hi - lo;
    let unscale = |c: Vec<f64>| -> Polynomial {
        let coeffs = c
            .iter()
            .enumerate()
            .map(|(k, v)| v / width.powi(k as i32))
            .collect();
        Polynomial::new(lo, coeffs)
    };
    let special = g.breakpoints();
    if !g.is_discrete() {
        if let Some(r) = remez::remez(|t| g.eval(t), lo, hi, m, &special, grid_n)? {
            return Ok(PolyFit {
                poly: unscale(r.scaled_coeffs),
                error: r.error,
                iterations: r.iterations,
                converged: true,
                method: FitMethod::Remez,
            });
        }
    }
    let basis = PolyBasis { m, lo, width };
    let samples = g.sample_points();
    let out = exchange_fit(
        &basis,
        |t| g.eval(t),
        lo,
        hi,
        &special,
        samples.as_deref(),
        grid_n,
    )?;
    Ok(PolyFit {
        poly: unscale(out.coeffs),
        error: out.level,
        iterations: out.iterations,
        converged: out.converged,
        method: if samples.is_some() {
            FitMethod::LpDiscrete
        } else {
            FitMethod::LpExchange
        },
    })
}

fn finish(
    model: SplineModel,
    g: &TargetFunction,
    grid_n: usize,
    iterations: usize,
    converged: bool,
    method: FitMethod,
) -> Result<FitResult> {
    let settings = ProfileSettings {
        grid_n: grid_n.max(min_grid(&model)),
        tol_extreme: None,
        tau_zero: None,
    };
    let profile = deviation_profile(&model, g, &settings)?;
    Ok(FitResult {
        model,
        achieved_psi: profile.psi,
        equioscillation: profile.extremes,
        iterations,
        converged,
        method,
    })
}

/// Minimax polynomial of degree `m` for `f` on `[lo, hi]`, as a one-piece spline of
/// degree `max(m, 1)`.
pub fn best_polynomial(
    f: &TargetFunction,
    lo: f64,
    hi: f64,
    m: usize,
    grid_n: usize,
) -> Result<FitResult> {
    check_grid(grid_n, 10 * (m + 1))?;
    let g = f.restrict(lo, hi)?;
    let fit = fit_polynomial(&g, m, grid_n)?;
    // Splines start at degree 1; a constant is stored with a zero slope.
    let d = m.max(1);
    let mut c = fit.poly.coeffs.clone();
    c.resize(d + 1, 0.0);
    let blocks = vec![(1..=d).map(|j| c[d + 1 - j]).collect()];
    let model = SplineModel::new(d, lo, hi, Vec::new(), c[0], blocks)?;
    finish(model, &g, grid_n, fit.iterations, fit.converged, fit.method)
}

/// Minimax continuous spline of degree `m` with the internal knots held fixed.
pub fn best_fixed_knot_spline(
    f: &TargetFunction,
    knots: &[f64],
    m: usize,
    grid_n: usize,
) -> Result<FitResult> {
    let (lo, hi) = f.domain();
    if knots.windows(2).any(|w| w[0] >= w[1]) || knots.iter().any(|&k| k <= lo || k >= hi) {
        return Err(FkError::InvalidArgument(
            "knots must be strictly increasing and inside the domain".into(),
        ));
    }
    check_grid(grid_n, 10 * (m + 1) * (knots.len() + 1))?;
    let mut all = vec![lo];
    all.extend_from_slice(knots);
    let basis = SplineBasis { m, knots: all };
    let mut special = f.breakpoints();
    special.extend_from_slice(knots);
    let samples = f.sample_points();
    let out = exchange_fit(
        &basis,
        |t| f.eval(t),
        lo,
        hi,
        &special,
        samples.as_deref(),
        grid_n,
    )?;
    let blocks = out.coeffs[1..].chunks(m).map(<[f64]>::to_vec).collect();
    let model = SplineModel::new(m, lo, hi, knots.to_vec(), out.coeffs[0], blocks)?;
    let method = if samples.is_some() {
        FitMethod::LpDiscrete
    } else {
        FitMethod::LpExchange
    };
    finish(model, f, grid_n, out.iterations, out.converged, method)
}
