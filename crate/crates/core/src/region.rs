//! Subsets of the site set as 64-bit masks.
//!
//! A [`Region`] indexes a swap operator `T_Ω` on the two-copy space. Products
//! of swaps are symmetric differences of their regions, so the swap group is
//! the power set under `Δ`, and every set operation here is a single bitwise
//! instruction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SITES: usize = 64;

/// A subset of `{0, …, n-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Region {
    bits: u64,
    n: u8,
}

fn universe_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Region {
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_bits(0, n)
    }

    /// The whole site set `Λ`.
    pub fn full(n: usize) -> Result<Self> {
        if n > MAX_SITES {
            return Err(Error::TooManySites(n));
        }
        Ok(Self { bits: universe_mask(n), n: n as u8 })
    }

    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        if n > MAX_SITES {
            return Err(Error::TooManySites(n));
        }
        if bits & !universe_mask(n) != 0 {
            let site = 63 - bits.leading_zeros() as usize;
            return Err(Error::SiteOutOfRange { site, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn from_sites<I: IntoIterator<Item = usize>>(sites: I, n: usize) -> Result<Self> {
        if n > MAX_SITES {
            return Err(Error::TooManySites(n));
        }
        let mut bits = 0u64;
        for site in sites {
            if site >= n {
                return Err(Error::SiteOutOfRange { site, n });
            }
            bits |= 1 << site;
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Contiguous block `{start, …, end-1}`.
    pub fn interval(start: usize, end: usize, n: usize) -> Result<Self> {
        Self::from_sites(start..end, n)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        self.bits == universe_mask(self.n())
    }

    #[inline]
    pub fn contains(&self, site: usize) -> bool {
        site < 64 && self.bits >> site & 1 == 1
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.n()).filter(move |&i| bits >> i & 1 == 1)
    }

    fn check_same(&self, other: &Region) -> Result<()> {
        if self.n != other.n {
            return Err(Error::MismatchedSites { left: self.n(), right: other.n() });
        }
        Ok(())
    }

    #[inline]
    fn with_bits(&self, bits: u64) -> Region {
        Region { bits, n: self.n }
    }

    pub fn sym_diff(&self, other: &Region) -> Result<Region> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits ^ other.bits))
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits | other.bits))
    }

    pub fn intersection(&self, other: &Region) -> Result<Region> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits & other.bits))
    }

    /// `self − other`.
    pub fn difference(&self, other: &Region) -> Result<Region> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits & !other.bits))
    }

    pub fn complement(&self) -> Region {
        self.with_bits(!self.bits & universe_mask(self.n()))
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn intersects(&self, other: &Region) -> bool {
        self.bits & other.bits != 0
    }

    /// Whether `self` straddles the cut between `target` and its complement,
    /// i.e. `self ∈ ∂target`.
    pub fn in_boundary_of(&self, target: &Region) -> Result<bool> {
        self.check_same(target)?;
        Ok(straddles(self.bits, target.bits))
    }
}

/// Mask-level boundary test used on hot paths where `n` is already checked.
#[inline]
pub(crate) fn straddles(local: u64, target: u64) -> bool {
    local & target != 0 && local & !target != 0
}

/// Symmetric difference `a Δ b`, the index of the swap product `T_a T_b`.
pub fn sym_diff(a: &Region, b: &Region) -> Result<Region> {
    a.sym_diff(b)
}

/// True iff `candidate` meets both `target` and its complement.
pub fn in_boundary(candidate: &Region, target: &Region) -> Result<bool> {
    candidate.in_boundary_of(target)
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.n)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.sites().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}
