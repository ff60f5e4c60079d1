//! Exact solution of the uniform nearest-neighbour chain.
//!
//! Started from `T_{0..l}` the swap vector stays in the span of the nested
//! intervals `T_{0..j}`, `j = 0..=L`, where the ensemble map is tridiagonal.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `N_d = d / (d² + 1)`.
pub fn n_d(d: u32) -> f64 {
    let d = d as f64;
    d / (d * d + 1.0)
}

/// `e_p = 1 − 2 N_d = (d − 1)² / (d² + 1)`.
pub fn e_p(d: u32) -> f64 {
    let d = d as f64;
    (d - 1.0) * (d - 1.0) / (d * d + 1.0)
}

/// Chain of `length` sites, local dimension `d`, initial cut after `cut` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathParams {
    pub length: usize,
    pub d: u32,
    pub cut: usize,
}

impl PathParams {
    pub fn new(length: usize, d: u32, cut: usize) -> Result<Self> {
        if length < 2 {
            return Err(Error::InvalidParameter(format!("chain length must be >= 2, got {length}")));
        }
        if d < 2 {
            return Err(Error::LocalDimension(d));
        }
        if cut > length {
            return Err(Error::InvalidParameter(format!("cut {cut} exceeds chain length {length}")));
        }
        Ok(Self { length, d, cut })
    }

    /// Diagonal weight `a = (L − 2)/(L − 1)`.
    pub fn a(&self) -> f64 {
        (self.length as f64 - 2.0) / (self.length as f64 - 1.0)
    }

    /// Off-diagonal weight `b = N_d/(L − 1)`.
    pub fn b(&self) -> f64 {
        n_d(self.d) / (self.length as f64 - 1.0)
    }

    fn angle(&self, h: usize) -> f64 {
        PI * h as f64 / self.length as f64
    }

    /// `Δ_h = (1 − 2 N_d cos(πh/L)) / (L − 1)`.
    pub fn mode_gap(&self, h: usize) -> f64 {
        (1.0 - 2.0 * n_d(self.d) * self.angle(h).cos()) / (self.length as f64 - 1.0)
    }

    /// `(d^{L−l} + d^l)/(d^L + 1)`.
    pub fn purity_infinity(&self) -> f64 {
        let d = self.d as f64;
        let (l, len) = (self.cut as i32, self.length as i32);
        (d.powi(-l) + d.powi(l - len)) / (1.0 + d.powi(-len))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// `λ_0 = 1, λ_1, …, λ_{L−1}, λ_L = 1`.
    pub eigenvalues: Vec<f64>,
    /// `Δ_h` for `h = 1..L−1`.
    pub gaps: Vec<f64>,
    pub gap: f64,
}

/// The ensemble map on the nested-interval basis.
pub fn reduced_matrix(p: &PathParams) -> DMatrix<f64> {
    let len = p.length;
    let (a, b) = (p.a(), p.b());
    let mut m = DMatrix::zeros(len + 1, len + 1);
    m[(0, 0)] = 1.0;
    m[(len, len)] = 1.0;
    for i in 1..len {
        m[(i, i)] = a;
        m[(i - 1, i)] = b;
        m[(i + 1, i)] = b;
    }
    m
}

pub fn spectrum(p: &PathParams) -> SpectralData {
    let (a, b) = (p.a(), p.b());
    let mut eigenvalues = vec![1.0];
    eigenvalues.extend((1..p.length).map(|h| a + 2.0 * b * p.angle(h).cos()));
    eigenvalues.push(1.0);
    let gaps: Vec<f64> = (1..p.length).map(|h| p.mode_gap(h)).collect();
    let gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    SpectralData { eigenvalues, gaps, gap }
}

/// `Δ = (1 − 2 N_d cos(π/L)) / (L − 1)`.
pub fn spectral_gap_1d(p: &PathParams) -> f64 {
    p.mode_gap(1)
}

/// Average purity of the first `cut` sites after `k` steps, from the
/// closed-form mode expansion over odd `h`.
pub fn purity_exact(p: &PathParams, k: usize) -> f64 {
    let len = p.length;
    if p.cut == 0 || p.cut == len {
        return 1.0;
    }
    let two_nd = 2.0 * n_d(p.d);
    let mut sum = 0.0;
    for h in (1..len).step_by(2) {
        let x = p.angle(h);
        let weight = two_nd * x.sin() / (two_nd * x.cos() - 1.0) + 1.0 / (x / 2.0).tan();
        let lambda = 1.0 - p.mode_gap(h);
        sum += lambda.powi(k as i32) * (x * p.cut as f64).sin() * weight;
    }
    p.purity_infinity() + 2.0 / len as f64 * sum
}

/// `1ᵀ Rᵏ e_l` by repeated multiplication; the reference for [`purity_exact`].
pub fn purity_matrix_power(p: &PathParams, k: usize) -> f64 {
    let r = reduced_matrix(p);
    let mut v = nalgebra::DVector::zeros(p.length + 1);
    v[p.cut] = 1.0;
    for _ in 0..k {
        v = &r * v;
    }
    v.sum()
}

/// `(1 − e_p/(L − 1))^k`, valid before the evolving cut can reach either end.
pub fn short_time_purity(p: &PathParams, k: usize) -> Result<f64> {
    let window = p.cut.min(p.length - p.cut);
    if k > window {
        return Err(Error::InvalidParameter(format!(
            "short-time form needs k <= {window}, got {k}"
        )));
    }
    Ok((1.0 - e_p(p.d) / (p.length as f64 - 1.0)).powi(k as i32))
}

/// Unit-norm eigenvector of [`reduced_matrix`] for `λ_h`.
pub fn eigenvector(p: &PathParams, h: usize) -> Result<Vec<f64>> {
    let len = p.length;
    if h > len {
        return Err(Error::InvalidParameter(format!("mode index {h} exceeds {len}")));
    }
    let mut v = vec![0.0; len + 1];
    if h == 0 || h == len {
        v[h] = 1.0;
        return Ok(v);
    }
    let x = p.angle(h);
    for (j, c) in v.iter_mut().enumerate().take(len).skip(1) {
        *c = (x * j as f64).sin();
    }
    let edge = -p.b() / p.mode_gap(h);
    v[0] = edge * x.sin();
    v[len] = edge * (x * (len - 1) as f64).sin();
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= norm);
    Ok(v)
}

/// Steps needed to bring the purity within `epsilon` of its limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSteps {
    /// Smallest `k` with `|P_k − P_∞| ≤ ε`.
    pub exact: usize,
    /// `(L/e_p)(log(C/ε) + log l)` for the supplied `C`.
    pub analytic: Option<f64>,
}

pub fn steps_to_converge(p: &PathParams, epsilon: f64, constant: Option<f64>) -> Result<ConvergenceSteps> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let p_inf = p.purity_infinity();
    let err = |k: usize| (purity_exact(p, k) - p_inf).abs();
    // doubling search for a horizon, then the first k inside it
    let mut hi = 1usize;
    while err(hi) > epsilon {
        hi = hi.checked_mul(2).ok_or_else(|| Error::CapExceeded("convergence horizon overflow".into()))?;
    }
    let exact = (0..=hi).find(|&k| err(k) <= epsilon).unwrap_or(hi);
    let analytic = constant.map(|c| {
        let l = p.cut.max(1) as f64;
        p.length as f64 / e_p(p.d) * ((c / epsilon).ln() + l.ln())
    });
    Ok(ConvergenceSteps { exact, analytic })
}

/// Smallest `C` with `|P_k − P_∞| ≤ l e^{−kΔ} C` over `k = 0..=k_max`.
pub fn empirical_constant(p: &PathParams, k_max: usize) -> f64 {
    if p.cut == 0 || p.cut == p.length {
        return 0.0;
    }
    let gap = spectral_gap_1d(p);
    let p_inf = p.purity_infinity();
    (0..=k_max)
        .map(|k| (purity_exact(p, k) - p_inf).abs() * (k as f64 * gap).exp() / p.cut as f64)
        .fold(0.0, f64::max)
}
