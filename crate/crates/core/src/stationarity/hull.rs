//! Zero-in-convex-hull decisions via Wolfe's minimum-norm-point algorithm.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};

/// Convex weights exhibiting a point of the hull within `residual` of the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullCertificate {
    /// Positions of the members in the input list.
    pub indices: Vec<usize>,
    pub members: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    /// `|sum lambda_i v_i|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullVerdict {
    Inside(HullCertificate),
    /// `<direction, v> >= distance` for every input vector; `direction` is a unit vector.
    Outside {
        direction: Vec<f64>,
        distance: f64,
    },
}

impl HullVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, HullVerdict::Inside(_))
    }
}

/// Largest sup-norm among the vectors; the natural scale for hull tolerances.
pub fn generator_scale(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// Minimum-norm point of `co(points)` as convex weights over `points`.
pub fn min_norm_point(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = points.len();
    let Some(first) = points.first() else {
        return Err(FkError::InvalidArgument("empty point set".into()));
    };
    let d = first.len();
    if let Some(v) = points.iter().find(|v| v.len() != d) {
        return Err(FkError::DimensionMismatch {
            expected: d,
            got: v.len(),
        });
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(FkError::NonFinite(f64::NAN));
    }
    let p: Vec<DVector<f64>> = points
        .iter()
        .map(|v| DVector::from_column_slice(v))
        .collect();
    let scale2 = p
        .iter()
        .map(|v| v.norm_squared())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = 1e-13 * scale2;

    let start = (0..n)
        .min_by(|&a, &b| p[a].norm_squared().total_cmp(&p[b].norm_squared()))
        .unwrap();
    let mut active: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let combine = |active: &[usize], w: &[f64]| -> DVector<f64> {
        active
            .iter()
            .zip(w)
            .fold(DVector::zeros(d), |acc, (&i, &l)| acc + &p[i] * l)
    };

    let max_major = 50 * (n + d) + 100;
    for _ in 0..max_major {
        let x = combine(&active, &lambda);
        let xx = x.norm_squared();
        if xx <= eps * 1e-6 {
            break;
        }
        let (j, xj) = (0..n)
            .map(|i| (i, x.dot(&p[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xj >= xx - eps || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);

        loop {
            let alpha = affine_min_norm(&p, &active);
            if alpha.iter().all(|&a| a > 1e-15) {
                lambda = alpha;
                break;
            }
            let mut theta = 1.0_f64;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= 1e-15 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l += theta * (a - *l);
            }
            let mut k = 0;
            while k < active.len() {
                if lambda[k] <= 1e-15 {
                    active.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            if active.is_empty() {
                return Err(FkError::Solver(
                    "minimum-norm-point iteration emptied its support".into(),
                ));
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            if active.len() == 1 {
                lambda = vec![1.0];
                break;
            }
        }
    }
    let mut w = vec![0.0; n];
    for (&i, &l) in active.iter().zip(&lambda) {
        w[i] += l;
    }
    Ok(w)
}

/// Weights of the minimum-norm point of the affine hull of the active points.
fn affine_min_norm(p: &[DVector<f64>], active: &[usize]) -> Vec<f64> {
    let k = active.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            a[(r, c)] = p[i].dot(&p[j]);
        }
        a[(r, k)] = 1.0;
        a[(k, r)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k + 1);
    b[k] = 1.0;
    let sol = a
        .clone()
        .lu()
        .solve(&b)
        .filter(|s| s.iter().all(|x| x.is_finite()))
        .unwrap_or_else(|| {
            a.svd(true, true)
                .solve(&b, 1e-14)
                .unwrap_or_else(|_| DVector::from_element(k + 1, 1.0 / k as f64))
        });
    sol.iter().take(k).copied().collect()
}

/// Decides `0 in co(points)` to within `tol`.
pub fn zero_in_hull(points: &[Vec<f64>], tol: f64) -> Result<HullVerdict> {
    if !(tol > 0.0) {
        return Err(FkError::InvalidArgument(
            "hull tolerance must be positive".into(),
        ));
    }
    let w = min_norm_point(points)?;
    let d = points[0].len();
    let mut z = vec![0.0; d];
    for (v, &l) in points.iter().zip(&w) {
        for (zi, vi) in z.iter_mut().zip(v) {
            *zi += l * vi;
        }
    }
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= tol {
        let indices: Vec<usize> = (0..points.len()).filter(|&i| w[i] > 0.0).collect();
        return Ok(HullVerdict::Inside(HullCertificate {
            members: indices.iter().map(|&i| points[i].clone()).collect(),
            lambdas: indices.iter().map(|&i| w[i]).collect(),
            indices,
            residual: norm,
        }));
    }
    let direction: Vec<f64> = z.iter().map(|x| x / norm).collect();
    let distance = points
        .iter()
        .map(|v| v.iter().zip(&direction).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(HullVerdict::Outside {
        direction,
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_cross_contains_origin() {
        let pts = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let HullVerdict::Inside(c) = zero_in_hull(&pts, 1e-8).unwrap() else {
            panic!("origin should be inside");
        };
        assert!((c.lambdas.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(c.residual <= 1e-8);
    }

    #[test]
    fn half_plane_separates() {
        let pts = vec![vec![1.0, 0.0], vec![2.0, 1.0]];
        match zero_in_hull(&pts, 1e-8).unwrap() {
            HullVerdict::Outside {
                direction,
                distance,
            } => {
                assert!((direction[0] - 1.0).abs() < 1e-12 && direction[1].abs() < 1e-12);
                assert!((distance - 1.0).abs() < 1e-12);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn origin_on_an_edge() {
        let pts = vec![vec![1.0, 1.0], vec![-2.0, -2.0], vec![3.0, 5.0]];
        assert!(zero_in_hull(&pts, 1e-8).unwrap().is_inside());
    }

    #[test]
    fn bad_input() {
        assert!(zero_in_hull(&[], 1e-8).is_err());
        assert!(zero_in_hull(&[vec![1.0], vec![1.0, 2.0]], 1e-8).is_err());
        assert!(zero_in_hull(&[vec![1.0]], 0.0).is_err());
    }
}
