//! Dense polynomials stored in Taylor form about a center point.

use serde::{Deserialize, Serialize};

use crate::binom::binomial;

/// A polynomial `sum_k coeffs[k] * (t - center)^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub center: f64,
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(center: f64, coeffs: Vec<f64>) -> Self {
        Polynomial { center, coeffs }
    }

    pub fn zero(center: f64, degree: usize) -> Self {
        Polynomial {
            center,
            coeffs: vec![0.0; degree + 1],
        }
    }

    /// Polynomial in plain monomial form (center 0).
    pub fn monomial(coeffs: Vec<f64>) -> Self {
        Polynomial {
            center: 0.0,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let x = t - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// First derivative at `t`.
    pub fn eval_derivative(&self, t: f64) -> f64 {
        let x = t - self.center;
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    /// Re-expand about a new center (Taylor shift).
    pub fn recentered(&self, center: f64) -> Polynomial {
        let d = center - self.center;
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        // (t - c_old)^j = ((t - c_new) + d)^j = sum_k C(j,k) d^(j-k) (t - c_new)^k
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate().take(j + 1) {
                *slot += c * binomial(j, k) * d.powi((j - k) as i32);
            }
        }
        Polynomial {
            center,
            coeffs: out,
        }
    }

    /// Coefficients of `1, t, t^2, ...`.
    pub fn to_monomial(&self) -> Vec<f64> {
        self.recentered(0.0).coeffs
    }

    /// Adds `other` (any center) into `self`, keeping this center.
    pub fn add_assign_poly(&mut self, other: &Polynomial) {
        let shifted = other.recentered(self.center);
        if shifted.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(shifted.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(shifted.coeffs.iter()) {
            *a += b;
        }
    }
}
