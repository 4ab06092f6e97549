//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use fkcheb_core::{SplineModel, TargetFunction};

pub fn abs_cubed() -> SplineModel {
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

pub fn example1_points() -> (Vec<f64>, Vec<f64>) {
    (
        vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
        vec![7.0, 2.0, -0.875, 1.0, -0.875, 2.0, 7.0],
    )
}

pub fn example1_finite() -> TargetFunction {
    let (ts, fs) = example1_points();
    TargetFunction::points(ts, fs).unwrap()
}

/// Model with the parameter vector moved by `h g`.
pub fn shifted(model: &SplineModel, g: &[f64], h: f64) -> SplineModel {
    let x: Vec<f64> = model
        .params()
        .iter()
        .zip(g)
        .map(|(a, b)| a + h * b)
        .collect();
    let (lo, hi) = model.domain();
    SplineModel::from_params(model.degree(), lo, hi, &x).unwrap()
}

pub fn unit(mut g: Vec<f64>) -> Vec<f64> {
    let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    g.iter_mut().for_each(|v| *v /= n);
    g
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

pub struct OracleResult {
    pub inside: bool,
    pub norm: f64,
    pub lambdas: Vec<f64>,
}

/// Decides `0 in co(points)` by accelerated projected gradient on `|sum lambda_i v_i|^2`
/// over the simplex. Stops once the residual is below `tol` or a separating direction
/// proves the distance exceeds `tol`.
pub fn hull_oracle(points: &[Vec<f64>], tol: f64) -> OracleResult {
    let n = points.len();
    let d = points[0].len();
    let lip: f64 = 2.0
        * points
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>();
    let step = 1.0 / lip.max(1e-300);
    let combine = |lam: &[f64]| {
        let mut z = vec![0.0; d];
        for (v, l) in points.iter().zip(lam) {
            for (zi, vi) in z.iter_mut().zip(v) {
                *zi += l * vi;
            }
        }
        z
    };
    let sq = |z: &[f64]| z.iter().map(|x| x * x).sum::<f64>();
    let mut lam = vec![1.0 / n as f64; n];
    let mut y = lam.clone();
    let mut t = 1.0_f64;
    let mut best = f64::INFINITY;
    for _ in 0..400_000 {
        let z = combine(&lam);
        let norm = sq(&z).sqrt();
        if norm <= tol {
            return OracleResult {
                inside: true,
                norm,
                lambdas: lam,
            };
        }
        let lower = points
            .iter()
            .map(|v| v.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() / norm)
            .fold(f64::INFINITY, f64::min);
        if lower > tol {
            return OracleResult {
                inside: false,
                norm,
                lambdas: lam,
            };
        }
        let zy = combine(&y);
        let next: Vec<f64> = project_simplex(
            &points
                .iter()
                .zip(&y)
                .map(|(v, l)| l - step * 2.0 * v.iter().zip(&zy).map(|(a, b)| a * b).sum::<f64>())
                .collect::<Vec<_>>(),
        );
        let value = sq(&combine(&next));
        if value > best {
            // Restart the momentum when the objective goes up.
            t = 1.0;
            y = lam.clone();
            continue;
        }
        best = value;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = next
            .iter()
            .zip(&lam)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        lam = next;
        t = t_next;
    }
    let z = combine(&lam);
    let norm = sq(&z).sqrt();
    OracleResult {
        inside: norm <= tol,
        norm,
        lambdas: lam,
    }
}

use rand::Rng;

/// Random spline with well separated knots; `neutral_prob` zeroes `a_lm`.
pub fn random_model<R: Rng>(rng: &mut R, m: usize, n: usize, neutral_prob: f64) -> SplineModel {
    let lo: f64 = rng.random_range(-1.5..0.5);
    let hi = lo + rng.random_range(0.5..3.0);
    let knots = loop {
        let mut k: Vec<f64> = (1..n).map(|_| rng.random_range(lo..hi)).collect();
        k.sort_by(f64::total_cmp);
        let mut all = vec![lo];
        all.extend_from_slice(&k);
        all.push(hi);
        if all.windows(2).all(|w| w[1] - w[0] > 0.08 * (hi - lo)) {
            break k;
        }
    };
    let blocks = (0..n)
        .map(|i| {
            let mut b: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            if i > 0 && rng.random_bool(neutral_prob) {
                b[m - 1] = 0.0;
            }
            b
        })
        .collect();
    SplineModel::new(m, lo, hi, knots, rng.random_range(-1.0..1.0), blocks).unwrap()
}
