//! Sparse elements of the swap algebra and the local twirl update rule.
//!
//! A [`SwapVector`] is a real combination `Σ c_Ω T_Ω`. The Haar twirl of a
//! single region either fixes a swap (the region does not straddle it) or
//! splits it into the two swaps obtained by removing or absorbing the region,
//! with weights given by [`alpha_coefficients`].
//!
//! Terms are kept in a `BTreeMap` keyed by the raw mask so iteration order,
//! and hence every floating-point sum, is reproducible.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::region::{straddles, Region, MAX_SITES};

pub const DEFAULT_PRUNE_TOL: f64 = 1e-15;

/// Branching weights `(α₊, α₋)` for twirling `T_target` over `local`.
///
/// With `A = |local − target|` and `B = |local ∩ target|`,
/// `c± = (d^A ± d^B)/(d^(A+B) ± 1)` and `α± = (c⁺ ± c⁻)/2`.
pub fn alpha_coefficients(target: &Region, local: &Region, d: u32) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::LocalDimension(d));
    }
    if !local.in_boundary_of(target)? {
        return Err(Error::NotInBoundary { local: local.to_string(), target: target.to_string() });
    }
    let outside = local.difference(target)?.len() as i32;
    let inside = local.intersection(target)?.len() as i32;
    Ok(alpha_from_counts(outside, inside, d as f64))
}

/// `α±` from the two overlap counts; both counts must be at least one.
#[inline]
pub(crate) fn alpha_from_counts(outside: i32, inside: i32, d: f64) -> (f64, f64) {
    // divide numerator and denominator by d^(A+B) so large regions cannot overflow
    let ia = d.powi(-outside);
    let ib = d.powi(-inside);
    let iab = d.powi(-(outside + inside));
    let c_plus = (ib + ia) / (1.0 + iab);
    let c_minus = (ib - ia) / (1.0 - iab);
    ((c_plus + c_minus) / 2.0, (c_plus - c_minus) / 2.0)
}

/// A sparse real combination of swaps on `n` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapVector {
    n: usize,
    prune_tol: f64,
    terms: BTreeMap<u64, f64>,
}

impl SwapVector {
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_SITES {
            return Err(Error::TooManySites(n));
        }
        Ok(Self { n, prune_tol: DEFAULT_PRUNE_TOL, terms: BTreeMap::new() })
    }

    /// The single swap `T_region` with unit coefficient.
    pub fn swap(region: Region) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(region.bits(), 1.0);
        Self { n: region.n(), prune_tol: DEFAULT_PRUNE_TOL, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Region, f64)>>(n: usize, terms: I) -> Result<Self> {
        let mut v = Self::zero(n)?;
        for (region, c) in terms {
            if region.n() != n {
                return Err(Error::MismatchedSites { left: n, right: region.n() });
            }
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite coefficient {c}")));
            }
            *v.terms.entry(region.bits()).or_insert(0.0) += c;
        }
        v.prune();
        Ok(v)
    }

    pub fn with_prune_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("prune tolerance {tol}")));
        }
        self.prune_tol = tol;
        self.prune();
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prune_tol(&self) -> f64 {
        self.prune_tol
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, region: &Region) -> f64 {
        self.terms.get(&region.bits()).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Region, f64)> + '_ {
        let n = self.n;
        self.terms.iter().map(move |(&bits, &c)| {
            (Region::from_bits(bits, n).expect("stored masks fit the universe"), c)
        })
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<u64, f64> {
        &self.terms
    }

    fn empty_like(&self) -> Self {
        Self { n: self.n, prune_tol: self.prune_tol, terms: BTreeMap::new() }
    }

    fn prune(&mut self) {
        let tol = self.prune_tol;
        self.terms.retain(|_, c| c.abs() > tol);
    }

    /// `self += scale · other`, pruned afterwards.
    pub fn add_scaled(&mut self, other: &SwapVector, scale: f64) -> Result<()> {
        if other.n != self.n {
            return Err(Error::MismatchedSites { left: self.n, right: other.n });
        }
        for (&bits, &c) in &other.terms {
            *self.terms.entry(bits).or_insert(0.0) += scale * c;
        }
        self.prune();
        Ok(())
    }

    pub fn scaled(&self, scale: f64) -> SwapVector {
        let mut out = self.empty_like();
        out.terms = self.terms.iter().map(|(&b, &c)| (b, c * scale)).collect();
        out.prune();
        out
    }

    /// Contraction against `ω⊗ω` for a pure fully factorized `ω`: every swap
    /// contributes exactly one, so this is the coefficient sum.
    pub fn contract_factorized(&self) -> f64 {
        self.terms.values().sum()
    }

    /// `T_Ω ↦ T_{Ω^c}` extended linearly.
    pub fn complement_involution(&self) -> SwapVector {
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let mut out = self.empty_like();
        out.terms = self.terms.iter().map(|(&b, &c)| (!b & full, c)).collect();
        out
    }

    /// Twirl by the Haar average over `local`.
    pub fn apply_local(&self, local: &Region, d: u32) -> Result<SwapVector> {
        if d < 2 {
            return Err(Error::LocalDimension(d));
        }
        if local.n() != self.n {
            return Err(Error::MismatchedSites { left: self.n, right: local.n() });
        }
        if local.is_empty() {
            return Err(Error::InvalidParameter("local region must be nonempty".into()));
        }
        let mut out = self.empty_like();
        apply_local_into(&self.terms, local.bits(), d as f64, 1.0, &mut out.terms);
        out.prune();
        Ok(out)
    }

    /// Coefficients in the full `2^n` region basis, indexed by mask.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        if self.n > crate::spectral::MAX_DENSE_SITES {
            return Err(Error::CapExceeded(format!("dense swap vector on {} sites", self.n)));
        }
        let mut out = vec![0.0; 1 << self.n];
        for (&b, &c) in &self.terms {
            out[b as usize] = c;
        }
        Ok(out)
    }

    pub(crate) fn from_raw(n: usize, prune_tol: f64, terms: BTreeMap<u64, f64>) -> Self {
        let mut v = Self { n, prune_tol, terms };
        v.prune();
        v
    }
}

/// Accumulates `weight · R_local(v)` into `out` without pruning.
pub(crate) fn apply_local_into(
    terms: &BTreeMap<u64, f64>,
    local: u64,
    d: f64,
    weight: f64,
    out: &mut BTreeMap<u64, f64>,
) {
    for (&a, &c) in terms {
        if straddles(local, a) {
            let outside = (local & !a).count_ones() as i32;
            let inside = (local & a).count_ones() as i32;
            let (ap, am) = alpha_from_counts(outside, inside, d);
            *out.entry(a & !local).or_insert(0.0) += weight * c * ap;
            *out.entry(a | local).or_insert(0.0) += weight * c * am;
        } else {
            *out.entry(a).or_insert(0.0) += weight * c;
        }
    }
}

/// Free-function form of [`SwapVector::apply_local`].
pub fn apply_local(v: &SwapVector, local: &Region, d: u32) -> Result<SwapVector> {
    v.apply_local(local, d)
}

pub fn contract_factorized(v: &SwapVector) -> f64 {
    v.contract_factorized()
}

pub fn complement_involution(v: &SwapVector) -> SwapVector {
    v.complement_involution()
}
