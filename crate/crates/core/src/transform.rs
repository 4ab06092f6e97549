//! Block structure and the triangular change of coordinates `M = W V` that makes the
//! stationarity system separate into independent block systems.
//!
//! After `V`, the gradient of `P_l` has block `i < l` equal to
//! `(a_im, t - xi_i, ..., (t - xi_i)^m)` (block 0 starts with 1). `W` then subtracts
//! from every block the re-expansion of the block of the next non-neutral knot, so
//! `M grad P_l` is nonzero only on the blocks of the block subinterval containing
//! piece `l`.

use nalgebra::{DMatrix, DVector};

use crate::binom::binomial;
use crate::deviation::DeviationProfile;
use crate::error::{FkError, Result};
use crate::quasidiff::{confined_quasidiff, ParamVector};
use crate::spline::{KnotClass, SplineModel};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BlockStructure {
    /// `0`, the non-neutral internal knots, and `N`, increasing.
    pub delimiters: Vec<usize>,
    /// Consecutive delimiter pairs.
    pub blocks: Vec<(usize, usize)>,
}

impl BlockStructure {
    /// Both ends of `(p, q)` are delimiters, so the interval is a union of blocks.
    pub fn is_aligned(&self, p: usize, q: usize) -> bool {
        p < q && self.delimiters.contains(&p) && self.delimiters.contains(&q)
    }

    /// All block-aligned intervals, shortest first, then by left end.
    pub fn aligned_intervals(&self) -> Vec<(usize, usize)> {
        let d = &self.delimiters;
        let mut out: Vec<(usize, usize)> = (0..d.len())
            .flat_map(|i| (i + 1..d.len()).map(move |j| (d[i], d[j])))
            .collect();
        out.sort_by_key(|&(p, q)| (q - p, p));
        out
    }
}

/// Splits `[xi_0, xi_N]` at the non-neutral internal knots.
pub fn block_structure(model: &SplineModel, classes: &[KnotClass]) -> Result<BlockStructure> {
    if let Some(&l) = model.coincident_knots().first() {
        return Err(FkError::CoincidentKnots(l));
    }
    let n = model.num_pieces();
    if classes.len() + 1 != n {
        return Err(FkError::DimensionMismatch {
            expected: n - 1,
            got: classes.len(),
        });
    }
    let mut delimiters = vec![0];
    delimiters.extend(
        classes
            .iter()
            .filter(|c| !c.is_neutral())
            .map(|c| c.knot_index),
    );
    delimiters.push(n);
    let blocks = delimiters.windows(2).map(|w| (w[0], w[1])).collect();
    Ok(BlockStructure { delimiters, blocks })
}

#[derive(Debug, Clone)]
pub struct TransformMatrices {
    pub v: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub m: DMatrix<f64>,
    /// `k_map[p]`: the first non-neutral knot after `p`, if any.
    pub k_map: Vec<Option<usize>>,
    pub structure: BlockStructure,
    degree: usize,
    neutral: Vec<bool>,
}

/// Storage offset, inside a knot block, of the coefficient of `(t - xi_i)^k`.
fn power_offset(m: usize, k: usize) -> usize {
    m + 1 - k
}

pub fn build_transform(model: &SplineModel, classes: &[KnotClass]) -> Result<TransformMatrices> {
    let structure = block_structure(model, classes)?;
    let m = model.degree();
    let n = model.num_pieces();
    let dim = model.num_params();

    let mut v = DMatrix::<f64>::identity(dim, dim);
    for i in 1..n {
        let h = i * (m + 1);
        v[(h, h)] = -1.0;
        for k in 1..m {
            // v_k = (k+1) a_{i,m-k}
            let vk = (k + 1) as f64 * model.coeff(i, m - k);
            v[(h, h + power_offset(m, k))] = -vk;
        }
    }

    let mut neutral = vec![false; n];
    for c in classes {
        neutral[c.knot_index] = c.is_neutral();
    }
    let k_map: Vec<Option<usize>> = (0..n).map(|p| (p + 1..n).find(|&r| !neutral[r])).collect();

    let mut w = DMatrix::<f64>::identity(dim, dim);
    for p in 0..n {
        let Some(q) = k_map[p] else { continue };
        let (hp, hq) = (p * (m + 1), q * (m + 1));
        let aqm = model.alm(q);
        let apm = if p == 0 { 1.0 } else { model.alm(p) };
        let delta = model.knot(q) - model.knot(p);
        w[(hp, hq)] -= apm / aqm;
        for j in 1..=m {
            let row = hp + power_offset(m, j);
            w[(row, hq)] -= delta.powi(j as i32) / aqm;
            for k in 1..=j {
                w[(row, hq + power_offset(m, k))] -= binomial(j, k) * delta.powi((j - k) as i32);
            }
        }
    }
    let mm = &w * &v;
    Ok(TransformMatrices {
        v,
        w,
        m: mm,
        k_map,
        structure,
        degree: m,
        neutral,
    })
}

impl TransformMatrices {
    pub fn apply(&self, x: &[f64]) -> ParamVector {
        (&self.m * DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect()
    }

    /// Solves `M y = b`, using the triangular structure of both factors.
    pub fn solve(&self, b: &[f64]) -> Option<ParamVector> {
        let rhs = DVector::from_column_slice(b);
        let z = self.w.solve_upper_triangular(&rhs)?;
        let y = self.v.solve_upper_triangular(&z)?;
        Some(y.iter().copied().collect())
    }

    /// Coordinates of `M x` that can be nonzero for gradients of pieces inside the
    /// block-aligned interval `(p, q)`: every power coordinate of knot blocks
    /// `p..q`, plus the heads of the delimiting knots.
    pub fn interval_coordinates(&self, p: usize, q: usize) -> Result<Vec<usize>> {
        if !self.structure.is_aligned(p, q) {
            return Err(FkError::NotBlockAligned { p, q });
        }
        let m = self.degree;
        let mut out = Vec::with_capacity(m * (q - p) + 1);
        for i in p..q {
            let h = i * (m + 1);
            if i == 0 || !self.neutral[i] {
                out.push(h);
            }
            out.extend(h + 1..=h + m);
        }
        Ok(out)
    }
}

/// Transformed signed gradients `A` and unstable segments `B` of the interval,
/// projected to the interval's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedGenerators {
    pub a: Vec<ParamVector>,
    pub b: Vec<(ParamVector, ParamVector)>,
    pub coordinates: Vec<usize>,
}

pub fn transformed_generators(
    model: &SplineModel,
    profile: &DeviationProfile,
    mats: &TransformMatrices,
    p: usize,
    q: usize,
) -> Result<TransformedGenerators> {
    let coordinates = mats.interval_coordinates(p, q)?;
    let qd = confined_quasidiff(model, profile, p, q)?;
    let project = |x: &ParamVector| -> ParamVector {
        let y = mats.apply(x);
        coordinates.iter().map(|&c| y[c]).collect()
    };
    Ok(TransformedGenerators {
        a: qd.s_points.iter().map(project).collect(),
        b: qd
            .u_segments
            .iter()
            .map(|(u, v)| (project(u), project(v)))
            .collect(),
        coordinates,
    })
}
