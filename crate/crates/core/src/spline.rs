//! Continuous polynomial splines in the truncated-power parameterization.
//!
//! A spline of degree `m` with knots `xi_0 = a < xi_1 <= ... <= xi_{N-1} < xi_N = b`
//! is stored as
//!
//! ```text
//! s(t) = a00 + sum_{i=0}^{N-1} sum_{j=1}^{m} a_ij (t - xi_i)_+^(m+1-j)
//! ```
//!
//! The flat parameter vector is `(a00, x_0, xi_1, x_1, ..., xi_{N-1}, x_{N-1})` with
//! `x_i = (a_i1, ..., a_im)`, so knot block `i` occupies coordinates
//! `i*(m+1) ..= i*(m+1)+m`. The head coordinate of block 0 is `a00`, the head of
//! block `i >= 1` is the knot `xi_i`.

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::poly::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnotKind {
    Neutral,
    MaxKnot,
    MinKnot,
}

/// Classification of an internal knot by the sign of `a_lm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnotClass {
    pub knot_index: usize,
    pub kind: KnotKind,
    pub alm: f64,
}

impl KnotClass {
    pub fn is_neutral(&self) -> bool {
        self.kind == KnotKind::Neutral
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplineData", into = "SplineData")]
pub struct SplineModel {
    degree: usize,
    lo: f64,
    hi: f64,
    knots: Vec<f64>,
    a00: f64,
    blocks: Vec<Vec<f64>>,
    pieces: Vec<Polynomial>,
    sorted: bool,
}

/// Serialized form of a [`SplineModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplineData {
    pub degree: usize,
    pub lo: f64,
    pub hi: f64,
    pub knots: Vec<f64>,
    pub a00: f64,
    pub blocks: Vec<Vec<f64>>,
}

impl TryFrom<SplineData> for SplineModel {
    type Error = FkError;

    fn try_from(d: SplineData) -> Result<Self> {
        SplineModel::new(d.degree, d.lo, d.hi, d.knots, d.a00, d.blocks)
    }
}

impl From<SplineModel> for SplineData {
    fn from(s: SplineModel) -> Self {
        SplineData {
            degree: s.degree,
            lo: s.lo,
            hi: s.hi,
            knots: s.knots,
            a00: s.a00,
            blocks: s.blocks,
        }
    }
}

impl SplineModel {
    /// Builds a model; `blocks[i]` holds `(a_i1, ..., a_im)` and there is one block
    /// more than internal knots. Knots are kept in the given order; see [`normalize`].
    pub fn new(
        degree: usize,
        lo: f64,
        hi: f64,
        knots: Vec<f64>,
        a00: f64,
        blocks: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(FkError::InvalidModel("degree must be at least 1".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FkError::InvalidModel(format!(
                "interval [{lo}, {hi}] is empty or not finite"
            )));
        }
        if blocks.len() != knots.len() + 1 {
            return Err(FkError::InvalidModel(format!(
                "{} coefficient blocks for {} internal knots",
                blocks.len(),
                knots.len()
            )));
        }
        if let Some(b) = blocks.iter().find(|b| b.len() != degree) {
            return Err(FkError::InvalidModel(format!(
                "coefficient block of length {} for degree {degree}",
                b.len()
            )));
        }
        let all_finite = a00.is_finite()
            && knots.iter().all(|k| k.is_finite())
            && blocks.iter().flatten().all(|c| c.is_finite());
        if !all_finite {
            return Err(FkError::InvalidModel("non-finite parameter".into()));
        }
        let mut model = SplineModel {
            degree,
            lo,
            hi,
            knots,
            a00,
            blocks,
            pieces: Vec::new(),
            sorted: false,
        };
        model.sorted = model.is_sorted();
        model.pieces = model.build_pieces();
        Ok(model)
    }

    /// Constant spline on `[lo, hi]` with `pieces` intervals of equal length.
    pub fn constant(degree: usize, lo: f64, hi: f64, pieces: usize, value: f64) -> Result<Self> {
        let pieces = pieces.max(1);
        let knots = (1..pieces)
            .map(|i| lo + (hi - lo) * i as f64 / pieces as f64)
            .collect();
        SplineModel::new(
            degree,
            lo,
            hi,
            knots,
            value,
            vec![vec![0.0; degree]; pieces],
        )
    }

    /// Rebuilds a model from a flat parameter vector.
    pub fn from_params(degree: usize, lo: f64, hi: f64, params: &[f64]) -> Result<Self> {
        let w = degree + 1;
        if params.is_empty() || !params.len().is_multiple_of(w) {
            return Err(FkError::DimensionMismatch {
                expected: w * (params.len() / w).max(1),
                got: params.len(),
            });
        }
        let n = params.len() / w;
        let a00 = params[0];
        let mut knots = Vec::with_capacity(n - 1);
        let mut blocks = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                knots.push(params[i * w]);
            }
            blocks.push(params[i * w + 1..i * w + w].to_vec());
        }
        SplineModel::new(degree, lo, hi, knots, a00, blocks)
    }

    pub fn params(&self) -> Vec<f64> {
        let w = self.degree + 1;
        let mut x = vec![0.0; w * self.num_pieces()];
        x[0] = self.a00;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                x[i * w] = self.knots[i - 1];
            }
            x[i * w + 1..i * w + w].copy_from_slice(block);
        }
        x
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of polynomial pieces `N`.
    pub fn num_pieces(&self) -> usize {
        self.blocks.len()
    }

    /// Length `(m+1) N` of the parameter vector.
    pub fn num_params(&self) -> usize {
        (self.degree + 1) * self.num_pieces()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn internal_knots(&self) -> &[f64] {
        &self.knots
    }

    /// Knot `xi_i` for `i = 0..=N` (external knots included).
    pub fn knot(&self, i: usize) -> f64 {
        if i == 0 {
            self.lo
        } else if i >= self.num_pieces() {
            self.hi
        } else {
            self.knots[i - 1]
        }
    }

    /// All knots `xi_0, ..., xi_N`.
    pub fn all_knots(&self) -> Vec<f64> {
        (0..=self.num_pieces()).map(|i| self.knot(i)).collect()
    }

    pub fn a00(&self) -> f64 {
        self.a00
    }

    /// Coefficient block `x_i = (a_i1, ..., a_im)`.
    pub fn block(&self, i: usize) -> &[f64] {
        &self.blocks[i]
    }

    /// `a_ij` with `j` in `1..=m`.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.blocks[i][j - 1]
    }

    /// `a_lm`, the jump of the first derivative at knot `l`.
    pub fn alm(&self, l: usize) -> f64 {
        self.blocks[l][self.degree - 1]
    }

    /// Largest absolute coefficient, including `a00`.
    pub fn coeff_scale(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .fold(self.a00.abs(), |acc, c| acc.max(c.abs()))
    }

    /// Default zero threshold for `a_lm`.
    pub fn default_tau_zero(&self) -> f64 {
        1e-10 * self.coeff_scale().max(1.0)
    }

    /// Indices `i` with `xi_i == xi_{i+1}` among the internal knots.
    pub fn coincident_knots(&self) -> Vec<usize> {
        self.knots
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] == w[1])
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_sorted(&self) -> bool {
        self.knots.windows(2).all(|w| w[0] <= w[1])
    }

    fn build_pieces(&self) -> Vec<Polynomial> {
        let m = self.degree;
        let mut pieces = Vec::with_capacity(self.num_pieces());
        let mut current = Polynomial::zero(self.lo, m);
        current.coeffs[0] = self.a00;
        for i in 0..self.num_pieces() {
            let center = self.knot(i);
            current = current.recentered(center);
            for j in 1..=m {
                current.coeffs[m + 1 - j] += self.blocks[i][j - 1];
            }
            pieces.push(current.clone());
        }
        pieces
    }

    /// Polynomial piece `P_l` (1-based), in Taylor form about `xi_{l-1}`.
    /// Only meaningful for sorted knots.
    pub fn piece_poly(&self, l: usize) -> Result<&Polynomial> {
        if l == 0 || l > self.num_pieces() {
            return Err(FkError::IndexOutOfRange {
                index: l,
                max: self.num_pieces(),
            });
        }
        Ok(&self.pieces[l - 1])
    }

    /// Index `l` of the piece with `xi_{l-1} <= t <= xi_l`; the left piece at a knot.
    pub fn piece_index(&self, t: f64) -> usize {
        self.knots.partition_point(|&k| k < t) + 1
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= self.lo && t <= self.hi) {
            return Err(FkError::Domain {
                t,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluation without the domain check. Unsorted models fall back to the
    /// truncated-power sum.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        if !self.sorted {
            return self.eval_truncated(t);
        }
        self.pieces[self.piece_index(t) - 1].eval(t)
    }

    /// Direct sum of truncated powers. Slower and less well conditioned than
    /// [`SplineModel::eval`]; useful as a cross-check.
    pub fn eval_truncated(&self, t: f64) -> f64 {
        let m = self.degree;
        let mut acc = self.a00;
        for (i, block) in self.blocks.iter().enumerate() {
            let d = t - self.knot(i);
            if d < 0.0 {
                continue;
            }
            for (j, &c) in block.iter().enumerate() {
                acc += c * d.powi((m - j) as i32);
            }
        }
        acc
    }

    /// One classification per internal knot, by the sign of `a_lm` against `tau_zero`.
    pub fn classify_knots(&self, tau_zero: f64) -> Vec<KnotClass> {
        (1..self.num_pieces())
            .map(|l| {
                let alm = self.alm(l);
                let kind = if alm > tau_zero {
                    KnotKind::MaxKnot
                } else if alm < -tau_zero {
                    KnotKind::MinKnot
                } else {
                    KnotKind::Neutral
                };
                KnotClass {
                    knot_index: l,
                    kind,
                    alm,
                }
            })
            .collect()
    }

    /// Multiplicity of knot `l`: the largest `j` with `|a_lj| > tau_zero`, 0 when the
    /// whole block vanishes. The spline is `m - j` times continuously differentiable there.
    pub fn knot_multiplicity(&self, l: usize, tau_zero: f64) -> usize {
        self.blocks[l]
            .iter()
            .rposition(|c| c.abs() > tau_zero)
            .map_or(0, |j| j + 1)
    }
}

/// Sorts the internal knots and removes those outside `(a, b)`.
///
/// Knots at or beyond `b` never act on `[a, b]` and are dropped. A knot at or left of
/// `a` acts as a plain polynomial on the whole interval, so its block is re-expanded
/// about `a` and merged into `a00` and `x_0`.
pub fn normalize(model: &SplineModel) -> SplineModel {
    let m = model.degree;
    let (lo, hi) = model.domain();
    let mut a00 = model.a00;
    let mut first = model.blocks[0].clone();
    let mut kept: Vec<(f64, Vec<f64>)> = Vec::new();
    for (i, &k) in model.knots.iter().enumerate() {
        let block = &model.blocks[i + 1];
        if k >= hi {
            continue;
        }
        if k <= lo {
            let mut coeffs = vec![0.0; m + 1];
            for j in 1..=m {
                coeffs[m + 1 - j] = block[j - 1];
            }
            let shifted = Polynomial::new(k, coeffs).recentered(lo);
            a00 += shifted.coeffs[0];
            for j in 1..=m {
                first[j - 1] += shifted.coeffs[m + 1 - j];
            }
            continue;
        }
        kept.push((k, block.clone()));
    }
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (knots, mut rest): (Vec<f64>, Vec<Vec<f64>>) = kept.into_iter().unzip();
    let mut blocks = vec![first];
    blocks.append(&mut rest);
    SplineModel::new(m, lo, hi, knots, a00, blocks).expect("normalization keeps a valid model")
}
