//! Discrete minimax fitting by linear programming, refined by point exchange.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::deviation::local_maxima;
use crate::error::{FkError, Result};

/// Linear family `t -> sum_k c_k phi_k(t)`.
pub(crate) trait Basis {
    fn len(&self) -> usize;
    fn eval_into(&self, t: f64, out: &mut [f64]);

    fn row(&self, t: f64) -> Vec<f64> {
        let mut r = vec![0.0; self.len()];
        self.eval_into(t, &mut r);
        r
    }

    fn value(&self, coeffs: &[f64], t: f64) -> f64 {
        self.row(t).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }
}

/// Minimizes `max_i |rows_i . c - f_i|`. Returns `(c, level)`.
pub(crate) fn minimax_lp(rows: &[Vec<f64>], f: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || n == 0 {
        return Err(FkError::Solver("empty minimax problem".into()));
    }
    let col_scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = rows.iter().fold(0.0_f64, |a, r| a.max(r[j].abs()));
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let f_scale = f.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..n)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let r = lp.add_var(1.0, (0.0, f64::INFINITY));
    for (row, &fi) in rows.iter().zip(f) {
        let mut expr: Vec<(microlp::Variable, f64)> = vars
            .iter()
            .zip(row)
            .zip(&col_scale)
            .map(|((&v, &a), &s)| (v, a / s))
            .collect();
        expr.push((r, -1.0));
        lp.add_constraint(expr.as_slice(), ComparisonOp::Le, fi / f_scale);
        let neg: Vec<(microlp::Variable, f64)> = expr
            .iter()
            .map(|&(v, a)| if v == r { (v, -1.0) } else { (v, -a) })
            .collect();
        lp.add_constraint(neg.as_slice(), ComparisonOp::Le, -fi / f_scale);
    }
    let sol = lp
        .solve()
        .map_err(|e| FkError::Solver(format!("minimax LP: {e}")))?;
    let c: Vec<f64> = vars
        .iter()
        .zip(&col_scale)
        .map(|(&v, &s)| sol[v] * f_scale / s)
        .collect();
    let level = max_residual(rows, f, &c);
    Ok(polish(rows, f, c, level))
}

fn max_residual(rows: &[Vec<f64>], f: &[f64], c: &[f64]) -> f64 {
    rows.iter()
        .zip(f)
        .map(|(r, fi)| (r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() - fi).abs())
        .fold(0.0, f64::max)
}

/// Re-solves the equations of the active constraints by least squares, keeping the
/// result only if it does not raise the maximum residual.
fn polish(rows: &[Vec<f64>], f: &[f64], c: Vec<f64>, level: f64) -> (Vec<f64>, f64) {
    let n = c.len();
    let band = 1e-7 * level.max(1e-300);
    let active: Vec<(usize, f64)> = rows
        .iter()
        .zip(f)
        .enumerate()
        .filter_map(|(i, (r, fi))| {
            let res = r.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() - fi;
            (res.abs() >= level - band).then(|| (i, res.signum()))
        })
        .collect();
    if active.is_empty() || level == 0.0 {
        return (c, level);
    }
    let mut a = DMatrix::<f64>::zeros(active.len(), n + 1);
    let mut b = DVector::<f64>::zeros(active.len());
    for (k, &(i, s)) in active.iter().enumerate() {
        for j in 0..n {
            a[(k, j)] = rows[i][j];
        }
        a[(k, n)] = -s;
        b[k] = f[i];
    }
    let Ok(x) = a.svd(true, true).solve(&b, 1e-13) else {
        return (c, level);
    };
    let cp: Vec<f64> = x.iter().take(n).copied().collect();
    if cp.iter().any(|v| !v.is_finite()) {
        return (c, level);
    }
    let lp = max_residual(rows, f, &cp);
    if lp <= level {
        (cp, lp)
    } else {
        (c, level)
    }
}

pub(crate) struct ExchangeOutcome {
    pub coeffs: Vec<f64>,
    pub level: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) const MAX_EXCHANGE_ITER: usize = 40;

/// Minimax fit of `f` on `[lo, hi]` by the family `basis`.
///
/// With `samples` the problem is the finite LP on those abscissae. Otherwise the LP
/// starts from a coarse point set and the refined local maxima of the continuous
/// deviation are added until the level matches the true sup-norm.
pub(crate) fn exchange_fit<B: Basis, F: Fn(f64) -> f64>(
    basis: &B,
    f: F,
    lo: f64,
    hi: f64,
    special: &[f64],
    samples: Option<&[f64]>,
    grid_n: usize,
) -> Result<ExchangeOutcome> {
    if let Some(ts) = samples {
        let rows: Vec<Vec<f64>> = ts.iter().map(|&t| basis.row(t)).collect();
        let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        let (coeffs, level) = minimax_lp(&rows, &fs)?;
        return Ok(ExchangeOutcome {
            coeffs,
            level,
            iterations: 1,
            converged: true,
        });
    }
    let n0 = (8 * basis.len()).max(64);
    let mut pts: Vec<f64> = (0..=n0)
        .map(|i| lo + (hi - lo) * i as f64 / n0 as f64)
        .chain(special.iter().copied().filter(|&t| t > lo && t < hi))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f_scale = pts.iter().fold(0.0_f64, |a, &t| a.max(f(t).abs())).max(1.0);

    let mut best: Option<(Vec<f64>, f64)> = None;
    for it in 1..=MAX_EXCHANGE_ITER {
        let rows: Vec<Vec<f64>> = pts.iter().map(|&t| basis.row(t)).collect();
        let fs: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
        let (coeffs, level) = minimax_lp(&rows, &fs)?;
        let dev = |t: f64| basis.value(&coeffs, t) - f(t);
        let cands = local_maxima(dev, lo, hi, special, grid_n)?;
        let psi = cands.iter().fold(0.0_f64, |a, (_, d)| a.max(d.abs()));
        if best.as_ref().is_none_or(|(_, b)| psi < *b) {
            best = Some((coeffs.clone(), psi));
        }
        if psi - level <= 1e-11 * f_scale {
            let (coeffs, level) = best.unwrap();
            return Ok(ExchangeOutcome {
                coeffs,
                level,
                iterations: it,
                converged: true,
            });
        }
        let before = pts.len();
        pts.extend(
            cands
                .iter()
                .filter(|(_, d)| d.abs() > level)
                .map(|(t, _)| *t),
        );
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (hi - lo));
        if pts.len() == before {
            break;
        }
    }
    let (coeffs, level) = best.unwrap();
    Ok(ExchangeOutcome {
        coeffs,
        level,
        iterations: MAX_EXCHANGE_ITER,
        converged: false,
    })
}
