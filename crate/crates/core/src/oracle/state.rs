use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::haar::haar_state_vector;
use super::MAX_STATE_DIM;
use crate::error::{Error, Result};
use crate::region::Region;

const NORM_TOL: f64 = 1e-10;

/// `d^n`, refusing anything above `cap`.
pub(crate) fn checked_dim(n: usize, d: u32, cap: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::LocalDimension(d));
    }
    let mut dim = 1usize;
    for _ in 0..n {
        dim = dim
            .checked_mul(d as usize)
            .filter(|&x| x <= cap)
            .ok_or_else(|| Error::CapExceeded(format!("{d}^{n} exceeds {cap}")))?;
    }
    Ok(dim)
}

/// Flat-index offsets of every configuration of `sites`, little-endian in
/// the order given.
pub(crate) fn offsets(sites: &[usize], d: usize) -> Vec<usize> {
    let count = d.pow(sites.len() as u32);
    (0..count)
        .map(|mut loc| {
            let mut off = 0;
            for &s in sites {
                off += (loc % d) * d.pow(s as u32);
                loc /= d;
            }
            off
        })
        .collect()
}

/// Offsets for a region and for its complement; any flat index is uniquely
/// `inside[a] + outside[c]`.
pub(crate) struct Split {
    pub inside: Vec<usize>,
    pub outside: Vec<usize>,
}

impl Split {
    pub fn new(region: &Region, d: u32) -> Self {
        let inside: Vec<usize> = region.sites().collect();
        let outside: Vec<usize> = region.complement().sites().collect();
        Self { inside: offsets(&inside, d as usize), outside: offsets(&outside, d as usize) }
    }
}

/// Pure state on `n` sites of dimension `d`. Site `i` contributes digit
/// `i` of the little-endian base-`d` amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    amplitudes: Vec<Complex64>,
    n: usize,
    d: u32,
}

impl DenseState {
    pub fn basis(n: usize, d: u32, index: usize) -> Result<Self> {
        let dim = checked_dim(n, d, MAX_STATE_DIM)?;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, n, d })
    }

    /// `|0…0⟩`.
    pub fn zero_product(n: usize, d: u32) -> Result<Self> {
        Self::basis(n, d, 0)
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>, n: usize, d: u32) -> Result<Self> {
        let dim = checked_dim(n, d, MAX_STATE_DIM)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: amplitudes.len() });
        }
        let s = Self { amplitudes, n, d };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(s)
    }

    /// Global Haar-random pure state.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, d: u32, rng: &mut R) -> Result<Self> {
        let dim = checked_dim(n, d, MAX_STATE_DIM)?;
        Ok(Self { amplitudes: haar_state_vector(dim, rng), n, d })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_region(&self, region: &Region) -> Result<()> {
        if region.n() != self.n {
            return Err(Error::MismatchedSites { left: self.n, right: region.n() });
        }
        Ok(())
    }

    /// Apply `gate ⊗ 1` with the gate acting on the region's sites in
    /// ascending order.
    pub fn apply_gate(&mut self, region: &Region, gate: &DMatrix<Complex64>) -> Result<()> {
        self.check_region(region)?;
        let split = Split::new(region, self.d);
        let m = split.inside.len();
        if gate.nrows() != m || gate.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, actual: gate.nrows() });
        }
        let mut local = vec![Complex64::new(0.0, 0.0); m];
        for &c in &split.outside {
            for (a, slot) in local.iter_mut().enumerate() {
                *slot = self.amplitudes[split.inside[a] + c];
            }
            for (r, &off) in split.inside.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, v) in local.iter().enumerate() {
                    acc += gate[(r, col)] * v;
                }
                self.amplitudes[off + c] = acc;
            }
        }
        Ok(())
    }

    /// Amplitudes as a (region × complement) matrix.
    fn bipartite(&self, region: &Region) -> DMatrix<Complex64> {
        let split = Split::new(region, self.d);
        DMatrix::from_fn(split.inside.len(), split.outside.len(), |a, c| {
            self.amplitudes[split.inside[a] + split.outside[c]]
        })
    }

    /// `ω_Ω = Tr_{Ω^c} |ψ⟩⟨ψ|`, indexed like a gate on the region.
    pub fn reduced_density(&self, region: &Region) -> Result<DMatrix<Complex64>> {
        self.check_region(region)?;
        let m = self.bipartite(region);
        Ok(&m * m.adjoint())
    }

    /// `Tr(ω_Ω²)`, via whichever side of the cut is smaller.
    pub fn reduced_purity(&self, region: &Region) -> Result<f64> {
        self.check_region(region)?;
        let m = self.bipartite(region);
        let rho = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
        Ok(rho.iter().map(|z| z.norm_sqr()).sum())
    }
}

pub fn apply_gate(state: &DenseState, region: &Region, gate: &DMatrix<Complex64>) -> Result<DenseState> {
    let mut out = state.clone();
    out.apply_gate(region, gate)?;
    Ok(out)
}

pub fn reduced_purity(state: &DenseState, region: &Region) -> Result<f64> {
    state.reduced_purity(region)
}
