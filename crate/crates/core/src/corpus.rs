//! Seeded random problem instances: small splines against piecewise-linear targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::solvers::best_fixed_knot_spline;
use crate::spline::SplineModel;
use crate::target::TargetFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Random coefficients; some knots forced neutral.
    RandomSpline,
    /// Minimax spline for random fixed knots.
    FixedKnotFit,
    /// A minimax fit with every coefficient nudged.
    PerturbedFit,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: usize,
    pub origin: Origin,
    pub model: SplineModel,
    pub target: TargetFunction,
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusSettings {
    pub max_degree: usize,
    pub max_pieces: usize,
    /// Scan grid for the fits.
    pub grid_n: usize,
}

impl Default for CorpusSettings {
    fn default() -> Self {
        CorpusSettings {
            max_degree: 3,
            max_pieces: 4,
            grid_n: 2000,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sorted points in `(lo, hi)` at least `gap` apart from each other and the ends.
fn spaced_points<R: Rng>(rng: &mut R, lo: f64, hi: f64, k: usize, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| rng.random_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        let mut all = vec![lo];
        all.extend_from_slice(&v);
        all.push(hi);
        if all.windows(2).all(|w| w[1] - w[0] >= gap) {
            return v;
        }
    }
}

/// Continuous piecewise-linear function with 2 to 7 interior breakpoints, values in
/// `[-1, 1]`.
pub fn random_target<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Result<TargetFunction> {
    let k = rng.random_range(2..=7);
    let mut ts = vec![lo];
    ts.extend(spaced_points(rng, lo, hi, k, 0.04 * (hi - lo)));
    ts.push(hi);
    let fs = ts.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    TargetFunction::piecewise_linear(ts, fs)
}

/// Components uniform in `[-1, 1]`.
pub fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn random_spline<R: Rng>(
    rng: &mut R,
    m: usize,
    lo: f64,
    hi: f64,
    knots: Vec<f64>,
) -> Result<SplineModel> {
    let w = hi - lo;
    let n = knots.len() + 1;
    let blocks = (0..n)
        .map(|i| {
            let mut b: Vec<f64> = (1..=m)
                .map(|j| rng.random_range(-1.0..1.0) / w.powi((m + 1 - j) as i32))
                .collect();
            if i > 0 && rng.random_bool(0.25) {
                b[m - 1] = 0.0;
            }
            b
        })
        .collect();
    SplineModel::new(m, lo, hi, knots, rng.random_range(-1.0..1.0), blocks)
}

/// One instance per id, in the rotation random spline, fit, perturbed fit.
pub fn random_corpus(seed: u64, count: usize, settings: &CorpusSettings) -> Result<Vec<Instance>> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    for id in 0..count {
        let m = rng.random_range(1..=settings.max_degree);
        let n = rng.random_range(1..=settings.max_pieces);
        let lo: f64 = rng.random_range(-1.0..0.5);
        let hi = lo + rng.random_range(0.5..2.5);
        let target = random_target(&mut rng, lo, hi)?;
        let knots = spaced_points(&mut rng, lo, hi, n - 1, 0.1 * (hi - lo));
        let origin = match id % 3 {
            0 => Origin::RandomSpline,
            1 => Origin::FixedKnotFit,
            _ => Origin::PerturbedFit,
        };
        let model = match origin {
            Origin::RandomSpline => random_spline(&mut rng, m, lo, hi, knots)?,
            Origin::FixedKnotFit => {
                best_fixed_knot_spline(&target, &knots, m, settings.grid_n)?.model
            }
            Origin::PerturbedFit => {
                let fit = best_fixed_knot_spline(&target, &knots, m, settings.grid_n)?.model;
                let mut x = fit.params();
                for (k, v) in x.iter_mut().enumerate() {
                    // Leave the knots alone so they stay ordered.
                    if k % (m + 1) != 0 || k == 0 {
                        *v += 1e-2 * rng.random_range(-1.0..1.0);
                    }
                }
                SplineModel::from_params(m, lo, hi, &x)?
            }
        };
        out.push(Instance {
            id,
            origin,
            model,
            target,
        });
    }
    Ok(out)
}
