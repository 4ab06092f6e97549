mod common;

use common::hull_oracle;
use fkcheb_core::corpus::rng;
use fkcheb_core::stationarity::hull::{zero_in_hull, HullVerdict};
use rand::Rng;

fn random_set<R: Rng>(r: &mut R) -> Vec<Vec<f64>> {
    let d = r.random_range(1..=8);
    let n = r.random_range(1..=12);
    let shift: Vec<f64> = (0..d)
        .map(|_| r.random_range(-1.0..1.0) * r.random_range(0.0..1.5))
        .collect();
    (0..n)
        .map(|_| {
            shift
                .iter()
                .map(|c| c + r.random_range(-1.0..1.0))
                .collect()
        })
        .collect()
}

#[test]
fn verdicts_match_projected_gradient_oracle() {
    let mut r = rng(31);
    let tol = 1e-8;
    let mut inside = 0;
    for case in 0..200 {
        let pts = random_set(&mut r);
        let v = zero_in_hull(&pts, tol).unwrap();
        let o = hull_oracle(&pts, tol);
        assert_eq!(
            v.is_inside(),
            o.inside,
            "case {case}: oracle norm {}",
            o.norm
        );
        inside += usize::from(o.inside);
    }
    assert!(inside > 20 && inside < 180, "{inside} of 200 inside");
}

#[test]
fn certificates_and_separators_check_out() {
    let mut r = rng(32);
    let tol = 1e-8;
    for _ in 0..200 {
        let pts = random_set(&mut r);
        match zero_in_hull(&pts, tol).unwrap() {
            HullVerdict::Inside(c) => {
                let sum: f64 = c.lambdas.iter().sum();
                assert!((sum - 1.0).abs() < 1e-10);
                assert!(c.lambdas.iter().all(|&l| l >= 0.0));
                let d = pts[0].len();
                let z: Vec<f64> = (0..d)
                    .map(|k| {
                        c.indices
                            .iter()
                            .zip(&c.lambdas)
                            .map(|(&i, l)| l * pts[i][k])
                            .sum()
                    })
                    .collect();
                let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(norm <= tol);
                assert!((norm - c.residual).abs() < 1e-12);
            }
            HullVerdict::Outside {
                direction,
                distance,
            } => {
                assert!(distance > tol);
                for p in &pts {
                    let ip: f64 = p.iter().zip(&direction).map(|(a, b)| a * b).sum();
                    assert!(ip >= distance - 1e-12);
                }
            }
        }
    }
}
