//! Classic Remez exchange for minimax polynomials on an interval.

use nalgebra::{DMatrix, DVector};

use crate::deviation::local_maxima;
use crate::error::Result;

pub(crate) struct RemezOutcome {
    /// Coefficients of `((t - lo) / (hi - lo))^k`.
    pub scaled_coeffs: Vec<f64>,
    pub error: f64,
    pub iterations: usize,
}

pub(crate) const MAX_REMEZ_ITER: usize = 60;

fn eval_scaled(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * u + v)
}

/// Runs the exchange; `Ok(None)` when the error curve stops alternating often enough
/// or the reference system degenerates, so the caller can fall back to the LP.
pub(crate) fn remez<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    m: usize,
    special: &[f64],
    grid_n: usize,
) -> Result<Option<RemezOutcome>> {
    let width = hi - lo;
    let u_of = |t: f64| (t - lo) / width;
    let k = m + 2;
    let mut reference: Vec<f64> = (0..k)
        .map(|i| {
            lo + width * 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (k - 1) as f64).cos())
        })
        .collect();
    let f_scale = reference
        .iter()
        .fold(0.0_f64, |a, &t| a.max(f(t).abs()))
        .max(1.0);

    for it in 1..=MAX_REMEZ_ITER {
        let mut a = DMatrix::<f64>::zeros(k, k);
        let mut b = DVector::<f64>::zeros(k);
        for (i, &t) in reference.iter().enumerate() {
            let u = u_of(t);
            let mut pw = 1.0;
            for j in 0..=m {
                a[(i, j)] = pw;
                pw *= u;
            }
            a[(i, m + 1)] = if i % 2 == 0 { -1.0 } else { 1.0 };
            b[i] = f(t);
        }
        let Some(x) = a.lu().solve(&b) else {
            return Ok(None);
        };
        let c: Vec<f64> = x.iter().take(m + 1).copied().collect();
        let level = x[m + 1].abs();
        let dev = |t: f64| eval_scaled(&c, u_of(t)) - f(t);
        let cands = local_maxima(dev, lo, hi, special, grid_n)?;
        let max_err = cands.iter().fold(0.0_f64, |a, (_, d)| a.max(d.abs()));
        if max_err <= 1e-14 * f_scale || max_err - level <= 1e-13 * f_scale.max(max_err) {
            return Ok(Some(RemezOutcome {
                scaled_coeffs: c,
                error: max_err,
                iterations: it,
            }));
        }
        // Alternating sequence of the candidates: largest |e| per sign run.
        let mut alt: Vec<(f64, f64)> = Vec::new();
        for &(t, d) in &cands {
            if d == 0.0 {
                continue;
            }
            match alt.last_mut() {
                Some(last) if last.1.signum() == d.signum() => {
                    if d.abs() > last.1.abs() {
                        *last = (t, d);
                    }
                }
                _ => alt.push((t, d)),
            }
        }
        if alt.len() < k {
            return Ok(None);
        }
        let top = (0..alt.len())
            .max_by(|&i, &j| alt[i].1.abs().total_cmp(&alt[j].1.abs()))
            .unwrap();
        let lo_start = top.saturating_sub(k - 1);
        let hi_start = top.min(alt.len() - k);
        let start = (lo_start..=hi_start)
            .max_by(|&s, &r| {
                let ms = alt[s..s + k]
                    .iter()
                    .fold(f64::INFINITY, |a, x| a.min(x.1.abs()));
                let mr = alt[r..r + k]
                    .iter()
                    .fold(f64::INFINITY, |a, x| a.min(x.1.abs()));
                ms.total_cmp(&mr)
            })
            .unwrap();
        let next: Vec<f64> = alt[start..start + k].iter().map(|x| x.0).collect();
        if next == reference {
            return Ok(None);
        }
        reference = next;
    }
    Ok(None)
}
