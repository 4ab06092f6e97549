//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use fkcheb_core::corpus::rng;
use fkcheb_core::{Expr, ExprPiece, SplineModel, TargetFunction};
use rand::Rng;

/// The `|t|^3` spline and the piecewise-linear target through the seven points.
pub fn example1() -> (SplineModel, TargetFunction) {
    let model = SplineModel::new(
        3,
        -2.0,
        2.0,
        vec![0.0],
        8.0,
        vec![vec![-1.0, 6.0, -12.0], vec![2.0, 0.0, 0.0]],
    )
    .unwrap();
    let target = TargetFunction::piecewise_linear(
        vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
        vec![7.0, 2.0, -0.875, 1.0, -0.875, 2.0, 7.0],
    )
    .unwrap();
    (model, target)
}

/// `sin t` on `[0, pi]` joined to `-sin 2t` on `[pi, 3pi/2]`.
pub fn counterexample() -> TargetFunction {
    TargetFunction::pieces(vec![
        ExprPiece {
            lo: 0.0,
            hi: PI,
            expr: Expr::Sin {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
        },
        ExprPiece {
            lo: PI,
            hi: 1.5 * PI,
            expr: Expr::Sin {
                amp: -1.0,
                freq: 2.0,
                phase: 0.0,
            },
        },
    ])
    .unwrap()
}

pub fn point_set(seed: u64, dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect())
        .collect()
}
