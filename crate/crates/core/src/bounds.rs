//! Closed-form constants and analytic bounds.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::ensemble::LocalStructure;
use crate::error::{Error, Result};
use crate::path1d::{e_p, n_d};
use crate::region::{straddles, Region};

/// Which side of the true quantity a reported value sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    UpperBound,
    LowerBound,
    Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub kind: BoundKind,
    pub inputs: Vec<(String, f64)>,
    /// A second, looser form of the same bound where one exists.
    pub alternate: Option<f64>,
}

impl BoundReport {
    fn upper(value: f64, inputs: &[(&str, f64)]) -> Self {
        Self {
            value,
            kind: BoundKind::UpperBound,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            alternate: None,
        }
    }
}

/// Haar-averaged entangling power `e_p = (d − 1)²/(d² + 1)`.
pub fn entangling_power(d: u32) -> f64 {
    e_p(d)
}

/// `N_d = d/(d² + 1)`.
pub fn swap_constant(d: u32) -> f64 {
    n_d(d)
}

/// `p(A)`: total weight of the regions that straddle `target`.
pub fn boundary_probability(target: &Region, structure: &LocalStructure) -> Result<f64> {
    if target.n() != structure.n() {
        return Err(Error::MismatchedSites { left: structure.n(), right: target.n() });
    }
    Ok(structure
        .regions()
        .iter()
        .zip(structure.weights())
        .filter(|(r, _)| straddles(r.bits(), target.bits()))
        .fold(0.0, |acc, (_, w)| acc + w))
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} is not in [0, 1]")));
    }
    Ok(())
}

/// Upper bound on `P_k` from the largest (`p_x`) and smallest (`p_xtilde`)
/// boundary probability met along the first `k` steps. `value` is
/// `(1 − p̃ + 2N_d p)^k`; `alternate` is `exp[−k(p e_p − (p − p̃)/(1 − e_p))]`.
pub fn area_law_bound(p_x: f64, p_xtilde: f64, d: u32, k: usize) -> Result<BoundReport> {
    check_probability("pX", p_x)?;
    check_probability("pXtilde", p_xtilde)?;
    if p_xtilde > p_x {
        return Err(Error::InvalidParameter(format!("pXtilde = {p_xtilde} exceeds pX = {p_x}")));
    }
    if d < 2 {
        return Err(Error::LocalDimension(d));
    }
    let kf = k as f64;
    let binomial = (1.0 - p_xtilde + 2.0 * n_d(d) * p_x).powi(k as i32);
    let ep = e_p(d);
    let exponential = (-kf * (p_x * ep - (p_x - p_xtilde) / (1.0 - ep))).exp();
    let mut report = BoundReport::upper(binomial, &[("pX", p_x), ("pXtilde", p_xtilde), ("d", d as f64), ("k", kf)]);
    report.alternate = Some(exponential);
    Ok(report)
}

/// Extreme boundary probabilities over regions reachable from a target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachableExtremes {
    pub p_max: f64,
    pub p_min: f64,
    pub regions_visited: usize,
}

/// Largest reachable set kept by [`reachable_boundary_extremes`].
pub const MAX_REACHABLE: usize = 1 << 20;

/// Breadth-first search over regions reachable from `target` by at most
/// `k − 1` moves `A' → A' ∖ Ω` or `A' → A' ∪ Ω` with `Ω` straddling `A'`,
/// i.e. every region the swap vector can touch before each of `k` steps.
pub fn reachable_boundary_extremes(target: &Region, structure: &LocalStructure, k: usize) -> Result<ReachableExtremes> {
    let p0 = boundary_probability(target, structure)?;
    let mut seen: HashSet<u64> = HashSet::from([target.bits()]);
    let mut frontier = vec![target.bits()];
    for _ in 1..k {
        let mut next = Vec::new();
        for &a in &frontier {
            for r in structure.regions() {
                let w = r.bits();
                if !straddles(w, a) {
                    continue;
                }
                for b in [a & !w, a | w] {
                    if seen.insert(b) {
                        next.push(b);
                    }
                }
            }
        }
        if seen.len() > MAX_REACHABLE {
            return Err(Error::CapExceeded(format!("more than {MAX_REACHABLE} reachable regions")));
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let (mut p_max, mut p_min) = (p0, p0);
    for &bits in &seen {
        let p = boundary_probability(&Region::from_bits(bits, structure.n())?, structure)?;
        p_max = p_max.max(p);
        p_min = p_min.min(p);
    }
    Ok(ReachableExtremes { p_max, p_min, regions_visited: seen.len() })
}

/// Circuit length after which `|φ_k(A) − φ_∞(A)| ≤ ε` for the first moment:
/// `[log(‖ω‖₂‖A‖₂/ε) + (|ℒ| − 1) log 2] / log(1/(1 − q_min))`.
pub fn first_moment_convergence_bound(
    omega_norm: f64,
    a_norm: f64,
    epsilon: f64,
    q_min: f64,
    num_regions: usize,
) -> Result<BoundReport> {
    for (name, v) in [("omega_norm", omega_norm), ("a_norm", a_norm), ("epsilon", epsilon)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if !(q_min > 0.0 && q_min <= 1.0) {
        return Err(Error::InvalidParameter(format!("q_min must be in (0, 1], got {q_min}")));
    }
    if num_regions == 0 {
        return Err(Error::InvalidParameter("num_regions must be positive".into()));
    }
    let numerator = (omega_norm * a_norm / epsilon).ln() + (num_regions as f64 - 1.0) * std::f64::consts::LN_2;
    let value = if numerator <= 0.0 {
        0.0
    } else if q_min == 1.0 {
        // a single certain projection converges in one step
        1.0
    } else {
        numerator / (1.0 / (1.0 - q_min)).ln()
    };
    Ok(BoundReport::upper(
        value,
        &[
            ("omega_norm", omega_norm),
            ("a_norm", a_norm),
            ("epsilon", epsilon),
            ("q_min", q_min),
            ("num_regions", num_regions as f64),
        ],
    ))
}

pub const MAX_CANDIDATE_REGIONS: usize = 20;

/// All subset sums `Σ_k q(Ω_k) α_k`, `α ∈ {0,1}^{|ℒ|}`, sorted. The spectrum
/// of the first-moment ensemble map lies inside this multiset.
pub fn r1_candidate_spectrum(structure: &LocalStructure) -> Result<Vec<f64>> {
    let m = structure.len();
    if m > MAX_CANDIDATE_REGIONS {
        return Err(Error::CapExceeded(format!("{m} regions exceed {MAX_CANDIDATE_REGIONS}")));
    }
    let w = structure.weights();
    let mut sums = vec![0.0];
    for q in w {
        let shifted: Vec<f64> = sums.iter().map(|s| s + q).collect();
        sums.extend(shifted);
    }
    sums.sort_by(f64::total_cmp);
    Ok(sums)
}

/// Steps after which `|P_k − P_∞| = O(ε)` for a map with gap `Δ`:
/// `log(2^{n/2}/ε) / log(1/(1 − Δ))`.
pub fn correlated_convergence_bound(gap: f64, n: usize, epsilon: f64) -> Result<BoundReport> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::InvalidParameter(format!("gap must be in (0, 1], got {gap}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let numerator = n as f64 / 2.0 * std::f64::consts::LN_2 - epsilon.ln();
    let value = if numerator <= 0.0 {
        0.0
    } else if gap == 1.0 {
        // the off-fixed part vanishes after one application
        1.0
    } else {
        numerator / (1.0 / (1.0 - gap)).ln()
    };
    Ok(BoundReport::upper(value, &[("gap", gap), ("n", n as f64), ("epsilon", epsilon)]))
}

/// Average trace distance of a region's marginal from maximally mixed once
/// `|P_k − P_∞| ≤ ε`: `√(d^{|Ω|}) √(d^{−|Ω^c|} + ε)`.
pub fn trace_distance_bound(region_size: f64, complement_size: f64, epsilon: f64, d: u32) -> f64 {
    let df = d as f64;
    df.powf(region_size / 2.0) * (df.powf(-complement_size) + epsilon).sqrt()
}

/// `δ = √t (√(d^{|Ω|−|Ω^c|} + d^{|Ω|} ε) + √(d^{|Ω|−|Ω^c|}))` for a measured `ε`.
pub fn t_design_delta_with(region_size: f64, complement_size: f64, epsilon: f64, t: usize, d: u32) -> Result<BoundReport> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let df = d as f64;
    let ratio = df.powf(region_size - complement_size);
    let value = (t as f64).sqrt() * ((ratio + df.powf(region_size) * epsilon).sqrt() + ratio.sqrt());
    Ok(BoundReport::upper(
        value,
        &[
            ("region_size", region_size),
            ("complement_size", complement_size),
            ("epsilon", epsilon),
            ("t", t as f64),
            ("d", df),
        ],
    ))
}

/// Local `t`-design distance bound with `|Ω^c| = (1 + α)|Ω|` and
/// `ε = d^{−(1+α)|Ω|}`; scales as `√t · d^{−α|Ω|/2}`.
pub fn t_design_delta(region_size: usize, alpha: f64, t: usize, d: u32) -> Result<BoundReport> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let size = region_size as f64;
    let complement = (1.0 + alpha) * size;
    let epsilon = (d as f64).powf(-complement);
    let mut report = t_design_delta_with(size, complement, epsilon, t, d)?;
    report.inputs.push(("alpha".into(), alpha));
    Ok(report)
}
