//! Purity dynamics under the three ensemble policies.
//!
//! Swap vectors evolve in the Heisenberg picture: for a circuit whose gates
//! act in time order `Ω₁, …, Ω_k` the averaged observable is
//! `R_{Ω₁} ∘ ⋯ ∘ R_{Ω_k}(T_A)`, so the map of the *last* gate is applied to
//! the swap vector first. The purity of a pure product state is then the
//! coefficient sum of that vector.

use crate::ensemble::{EnsembleSpec, Policy};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::region::Region;
use crate::swap::{apply_local_into, SwapVector};

use std::collections::BTreeMap;

fn check_region(initial: &Region, spec: &EnsembleSpec) -> Result<()> {
    if initial.n() != spec.n() {
        return Err(Error::MismatchedSites { left: spec.n(), right: initial.n() });
    }
    Ok(())
}

fn mixture(v: &SwapVector, spec: &EnsembleSpec, weights: &[f64]) -> SwapVector {
    let d = spec.d() as f64;
    let mut out = BTreeMap::new();
    for (region, &w) in spec.structure().regions().iter().zip(weights) {
        if w > 0.0 {
            apply_local_into(v.raw_terms(), region.bits(), d, w, &mut out);
        }
    }
    SwapVector::from_raw(v.n(), v.prune_tol(), out)
}

/// One uncorrelated step `Σ_Ω q(Ω) R_Ω(v)`, using the weight vector of
/// `step_index` when the policy carries a per-step sequence.
pub fn apply_step(v: &SwapVector, spec: &EnsembleSpec, step_index: usize) -> Result<SwapVector> {
    if v.n() != spec.n() {
        return Err(Error::MismatchedSites { left: spec.n(), right: v.n() });
    }
    let weights = spec.step_weights(step_index)?;
    Ok(mixture(v, spec, &weights))
}

/// One full correlated sweep; `order[0]` is applied to `v` first.
pub fn apply_sweep(v: &SwapVector, spec: &EnsembleSpec) -> Result<SwapVector> {
    let Policy::CorrelatedSweep { order } = spec.policy() else {
        return Err(Error::PolicyMismatch { expected: "correlated sweep" });
    };
    if v.n() != spec.n() {
        return Err(Error::MismatchedSites { left: spec.n(), right: v.n() });
    }
    let regions = spec.structure().regions();
    let mut cur = v.clone();
    for &i in order {
        cur = cur.apply_local(&regions[i], spec.d())?;
    }
    Ok(cur)
}

/// Purities `P_0..=P_k` for a time-independent Markov chain over regions.
///
/// The recursion conditions on the first gate of the circuit, which is the
/// last map applied to the swap vector: `G_r ← R_r(Σ_s M[r][s] G_s)` starting
/// from `G_r = R_r(T_A)`, and `P_j = Σ_r q₁(r) ⟨G_r⟩` after `j-1` updates.
pub fn markov_purity(initial: &Region, spec: &EnsembleSpec, k: usize) -> Result<Vec<f64>> {
    markov_purity_with(initial, spec, k, Execution::default())
}

pub fn markov_purity_with(
    initial: &Region,
    spec: &EnsembleSpec,
    k: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    let Policy::Markov { initial: q1, transition } = spec.policy() else {
        return Err(Error::PolicyMismatch { expected: "markov" });
    };
    check_region(initial, spec)?;
    let regions = spec.structure().regions();
    let d = spec.d();
    let t = SwapVector::swap(*initial);
    let contract = |g: &[SwapVector]| -> f64 {
        q1.iter().zip(g).map(|(q, v)| q * v.contract_factorized()).sum()
    };

    let mut out = Vec::with_capacity(k + 1);
    out.push(1.0);
    if k == 0 {
        return Ok(out);
    }
    let mut g: Vec<SwapVector> = regions
        .iter()
        .map(|r| t.apply_local(r, d))
        .collect::<Result<_>>()?;
    out.push(contract(&g));
    for _ in 2..=k {
        let next = map_range(regions.len(), exec, |r| {
            let mut acc = BTreeMap::new();
            for (s, gs) in g.iter().enumerate() {
                let w = transition[r][s];
                if w > 0.0 {
                    for (&b, &c) in gs.raw_terms() {
                        *acc.entry(b).or_insert(0.0) += w * c;
                    }
                }
            }
            let mut applied = BTreeMap::new();
            apply_local_into(&acc, regions[r].bits(), d as f64, 1.0, &mut applied);
            SwapVector::from_raw(t.n(), t.prune_tol(), applied)
        });
        g = next;
        out.push(contract(&g));
    }
    Ok(out)
}

/// Average purity `P_0..=P_{k_max}` of `initial` starting from a pure
/// product state.
///
/// A step is one mixture application for uncorrelated ensembles, one
/// transition for Markov chains, and one full sweep for correlated ensembles.
pub fn purity_trajectory(initial: &Region, spec: &EnsembleSpec, k_max: usize) -> Result<Vec<f64>> {
    check_region(initial, spec)?;
    let t = SwapVector::swap(*initial);
    match spec.policy() {
        Policy::Uncorrelated { per_step: None } => {
            let weights = spec.structure().weights();
            let mut out = vec![1.0];
            let mut v = t;
            for _ in 0..k_max {
                v = mixture(&v, spec, &weights);
                out.push(v.contract_factorized());
            }
            Ok(out)
        }
        Policy::Uncorrelated { per_step: Some(steps) } => {
            if k_max > steps.len() {
                return Err(Error::StepOutOfRange { index: k_max - 1, len: steps.len() });
            }
            // step 0 acts first in time, hence last on the swap vector
            let mut out = vec![1.0];
            for j in 1..=k_max {
                let mut v = t.clone();
                for s in (0..j).rev() {
                    v = apply_step(&v, spec, s)?;
                }
                out.push(v.contract_factorized());
            }
            Ok(out)
        }
        Policy::Markov { .. } => markov_purity(initial, spec, k_max),
        Policy::CorrelatedSweep { .. } => {
            let mut out = vec![1.0];
            let mut v = t;
            for _ in 0..k_max {
                v = apply_sweep(&v, spec)?;
                out.push(v.contract_factorized());
            }
            Ok(out)
        }
    }
}

/// The evolved swap vector after `k` steps of a time-independent uncorrelated
/// ensemble or `k` sweeps of a correlated one.
pub fn evolve(initial: &Region, spec: &EnsembleSpec, k: usize) -> Result<SwapVector> {
    check_region(initial, spec)?;
    let mut v = SwapVector::swap(*initial);
    match spec.policy() {
        Policy::Uncorrelated { per_step: None } => {
            let weights = spec.structure().weights();
            for _ in 0..k {
                v = mixture(&v, spec, &weights);
            }
        }
        Policy::CorrelatedSweep { .. } => {
            for _ in 0..k {
                v = apply_sweep(&v, spec)?;
            }
        }
        _ => return Err(Error::PolicyMismatch { expected: "time-independent uncorrelated or sweep" }),
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::LocalStructure;
    use approx::assert_abs_diff_eq;

    fn r(sites: &[usize], n: usize) -> Region {
        Region::from_sites(sites.iter().copied(), n).unwrap()
    }

    #[test]
    fn step_fixes_identity() {
        let spec = EnsembleSpec::uncorrelated(LocalStructure::path(4).unwrap(), 2).unwrap();
        let id = SwapVector::swap(Region::empty(4).unwrap());
        assert_eq!(apply_step(&id, &spec, 0).unwrap(), id);
    }

    #[test]
    fn single_region_step() {
        let s = LocalStructure::from_site_lists(2, &[vec![0, 1]], None).unwrap();
        let spec = EnsembleSpec::uncorrelated(s, 2).unwrap();
        let v = apply_step(&SwapVector::swap(r(&[0], 2)), &spec, 0).unwrap();
        assert_abs_diff_eq!(v.coefficient(&Region::empty(2).unwrap()), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coefficient(&r(&[0, 1], 2)), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn five_site_path_first_step() {
        let spec = EnsembleSpec::uncorrelated(LocalStructure::path(5).unwrap(), 2).unwrap();
        let v = apply_step(&SwapVector::swap(r(&[0, 1], 5)), &spec, 0).unwrap();
        assert_abs_diff_eq!(v.contract_factorized(), 0.95, epsilon = 1e-15);
        let traj = purity_trajectory(&r(&[0, 1], 5), &spec, 1).unwrap();
        assert_eq!(traj[0], 1.0);
        assert_abs_diff_eq!(traj[1], 0.95, epsilon = 1e-15);
    }

    #[test]
    fn per_step_weights_out_of_range() {
        let s = LocalStructure::path(3).unwrap();
        let spec = EnsembleSpec::new(
            s,
            Policy::Uncorrelated { per_step: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]) },
            2,
        )
        .unwrap();
        let v = SwapVector::swap(r(&[0], 3));
        assert!(apply_step(&v, &spec, 1).is_ok());
        assert_eq!(apply_step(&v, &spec, 2).unwrap_err(), Error::StepOutOfRange { index: 2, len: 2 });
        assert!(purity_trajectory(&r(&[0], 3), &spec, 3).is_err());
    }

    #[test]
    fn per_step_time_order() {
        // first gate {0,1}, then {1,2}: site 0 is only touched by the first gate
        let s = LocalStructure::path(3).unwrap();
        let spec = EnsembleSpec::new(
            s,
            Policy::Uncorrelated { per_step: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]) },
            2,
        )
        .unwrap();
        let traj = purity_trajectory(&r(&[0], 3), &spec, 2).unwrap();
        assert_abs_diff_eq!(traj[1], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(traj[2], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn sweep_examples() {
        let s = LocalStructure::path(3).unwrap();
        let spec = EnsembleSpec::new(s, Policy::sweep(vec![0, 1]), 2).unwrap();
        let id = SwapVector::swap(Region::empty(3).unwrap());
        assert_eq!(apply_sweep(&id, &spec).unwrap(), id);

        let t = SwapVector::swap(r(&[0], 3));
        let by_hand = t.apply_local(&r(&[0, 1], 3), 2).unwrap().apply_local(&r(&[1, 2], 3), 2).unwrap();
        let swept = apply_sweep(&t, &spec).unwrap();
        // 0.4 T_∅ + 0.16 T_{0} + 0.16 T_{012}
        assert_eq!(swept, by_hand);
        assert_abs_diff_eq!(swept.coefficient(&r(&[0], 3)), 0.16, epsilon = 1e-15);
        assert_abs_diff_eq!(swept.contract_factorized(), 0.72, epsilon = 1e-15);

        let single = LocalStructure::from_site_lists(3, &[vec![1, 2]], None).unwrap();
        let spec1 = EnsembleSpec::new(single, Policy::sweep(vec![0]), 2).unwrap();
        let u = SwapVector::swap(r(&[1], 3));
        assert_eq!(apply_sweep(&u, &spec1).unwrap(), u.apply_local(&r(&[1, 2], 3), 2).unwrap());
    }

    #[test]
    fn policy_mismatch() {
        let s = LocalStructure::path(3).unwrap();
        let spec = EnsembleSpec::uncorrelated(s.clone(), 2).unwrap();
        let v = SwapVector::swap(r(&[0], 3));
        assert!(apply_sweep(&v, &spec).is_err());
        assert!(markov_purity(&r(&[0], 3), &spec, 2).is_err());
        let sweep = EnsembleSpec::new(s, Policy::sweep(vec![0, 1]), 2).unwrap();
        assert!(apply_step(&v, &sweep, 0).is_err());
    }

    #[test]
    fn single_projection_trajectory() {
        let s = LocalStructure::from_site_lists(2, &[vec![0, 1]], None).unwrap();
        for d in [2u32, 3, 4] {
            let spec = EnsembleSpec::uncorrelated(s.clone(), d).unwrap();
            let traj = purity_trajectory(&r(&[0], 2), &spec, 5).unwrap();
            let df = d as f64;
            for p in &traj[1..] {
                assert_abs_diff_eq!(*p, 2.0 * df / (df * df + 1.0), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn markov_identity_chain_is_constant() {
        let s = LocalStructure::path(4).unwrap();
        let eye = (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let spec = EnsembleSpec::new(s, Policy::Markov { initial: vec![0.2, 0.5, 0.3], transition: eye }, 2).unwrap();
        let traj = markov_purity(&r(&[0, 1], 4), &spec, 6).unwrap();
        for p in &traj[2..] {
            assert_abs_diff_eq!(*p, traj[1], epsilon = 1e-15);
        }
    }

    #[test]
    fn markov_parallel_matches_sequential() {
        let s = LocalStructure::complete_graph(4).unwrap();
        let spec = EnsembleSpec::new(s.clone(), Policy::markov_neighbor(&s), 3).unwrap();
        let a = markov_purity_with(&r(&[0], 4), &spec, 10, Execution::Sequential).unwrap();
        let b = markov_purity_with(&r(&[0], 4), &spec, 10, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
