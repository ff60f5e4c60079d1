//! Dense matrix form of ensemble maps on the full `2^n` swap basis.
//!
//! Column `A` of a [`SwapMatrix`] holds the coefficients of `R(T_A)`. The
//! region basis is not orthonormal for the Hilbert–Schmidt product: the
//! normalized Gram matrix is `G_{A,B} = d^{-|A Δ B|} = ⊗_sites [[1, 1/d], [1/d, 1]]`,
//! so singular values are taken of `G^{1/2} R G^{-1/2}`, which is cheap to
//! form one site at a time.

use nalgebra::DMatrix;

use crate::ensemble::{EnsembleSpec, Policy};
use crate::error::{Error, Result};
use crate::region::Region;
use crate::swap::{apply_local_into, SwapVector};

use std::collections::BTreeMap;

pub const MAX_DENSE_SITES: usize = 14;
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Singular values within this factor of the rank tolerance are ambiguous.
const AMBIGUITY_FACTOR: f64 = 100.0;

/// Matrix of an ensemble map in the region basis, with the data needed to
/// interpret it.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapMatrix {
    pub n: usize,
    pub d: u32,
    pub matrix: DMatrix<f64>,
}

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_SITES {
        return Err(Error::CapExceeded(format!(
            "dense swap matrix needs n <= {MAX_DENSE_SITES}, got {n}"
        )));
    }
    Ok(())
}

fn matrix_from_columns<F>(n: usize, d: u32, column: F) -> Result<SwapMatrix>
where
    F: Fn(u64) -> BTreeMap<u64, f64>,
{
    check_dense(n)?;
    if d < 2 {
        return Err(Error::LocalDimension(d));
    }
    let dim = 1usize << n;
    let mut matrix = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for (b, c) in column(a as u64) {
            matrix[(b as usize, a)] += c;
        }
    }
    Ok(SwapMatrix { n, d, matrix })
}

/// Matrix of the weighted mixture `Σ w_i R_{Ω_i}`.
pub fn mixture_matrix(n: usize, regions: &[Region], weights: &[f64], d: u32) -> Result<SwapMatrix> {
    if regions.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: regions.len(), actual: weights.len() });
    }
    matrix_from_columns(n, d, |a| {
        let mut src = BTreeMap::new();
        src.insert(a, 1.0);
        let mut out = BTreeMap::new();
        for (r, &w) in regions.iter().zip(weights) {
            apply_local_into(&src, r.bits(), d as f64, w, &mut out);
        }
        out
    })
}

/// Matrix of the composition applying `regions[0]` first.
pub fn product_matrix(n: usize, regions: &[Region], d: u32) -> Result<SwapMatrix> {
    matrix_from_columns(n, d, |a| {
        let mut cur = BTreeMap::new();
        cur.insert(a, 1.0);
        for r in regions {
            let mut next = BTreeMap::new();
            apply_local_into(&cur, r.bits(), d as f64, 1.0, &mut next);
            cur = next;
        }
        cur
    })
}

/// Matrix of a single local twirl.
pub fn local_matrix(region: &Region, d: u32) -> Result<SwapMatrix> {
    product_matrix(region.n(), std::slice::from_ref(region), d)
}

/// Dense matrix of the ensemble map of one step: the weighted mixture for
/// time-independent uncorrelated ensembles, the full ordered product for
/// correlated sweeps.
pub fn build_swap_matrix(spec: &EnsembleSpec) -> Result<SwapMatrix> {
    let regions = spec.structure().regions();
    match spec.policy() {
        Policy::Uncorrelated { per_step: None } => {
            mixture_matrix(spec.n(), regions, &spec.structure().weights(), spec.d())
        }
        Policy::CorrelatedSweep { order } => {
            let ordered: Vec<Region> = order.iter().map(|&i| regions[i]).collect();
            product_matrix(spec.n(), &ordered, spec.d())
        }
        _ => Err(Error::PolicyMismatch { expected: "time-independent uncorrelated or sweep" }),
    }
}

impl SwapMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Apply to a swap vector on the same universe.
    pub fn apply(&self, v: &SwapVector) -> Result<Vec<f64>> {
        if v.n() != self.n {
            return Err(Error::MismatchedSites { left: self.n, right: v.n() });
        }
        let x = nalgebra::DVector::from_vec(v.to_dense()?);
        Ok((&self.matrix * x).iter().copied().collect())
    }

    /// `G^{1/2} M G^{-1/2}`: the same map in a Hilbert–Schmidt orthonormal basis.
    pub fn orthonormalized(&self) -> DMatrix<f64> {
        let (h, h_inv) = gram_root_factors(self.d);
        let mut m = self.matrix.clone();
        transform_rows(&mut m, self.n, h);
        transform_cols(&mut m, self.n, h_inv);
        m
    }
}

/// Per-site factors of `G^{1/2}` and `G^{-1/2}` as `(diagonal, off-diagonal)`.
fn gram_root_factors(d: u32) -> ((f64, f64), (f64, f64)) {
    let inv = 1.0 / d as f64;
    let (sp, sm) = ((1.0 + inv).sqrt(), (1.0 - inv).sqrt());
    let root = ((sp + sm) / 2.0, (sp - sm) / 2.0);
    let inv_root = ((1.0 / sp + 1.0 / sm) / 2.0, (1.0 / sp - 1.0 / sm) / 2.0);
    (root, inv_root)
}

/// Left-multiply by `⊗_sites [[p, q], [q, p]]`.
fn transform_rows(m: &mut DMatrix<f64>, n: usize, (p, q): (f64, f64)) {
    let dim = m.nrows();
    for site in 0..n {
        let bit = 1usize << site;
        for i in (0..dim).filter(|i| i & bit == 0) {
            let j = i | bit;
            for c in 0..m.ncols() {
                let (x, y) = (m[(i, c)], m[(j, c)]);
                m[(i, c)] = p * x + q * y;
                m[(j, c)] = q * x + p * y;
            }
        }
    }
}

/// Right-multiply by `⊗_sites [[p, q], [q, p]]` (symmetric).
fn transform_cols(m: &mut DMatrix<f64>, n: usize, (p, q): (f64, f64)) {
    let dim = m.ncols();
    for site in 0..n {
        let bit = 1usize << site;
        for i in (0..dim).filter(|i| i & bit == 0) {
            let j = i | bit;
            for r in 0..m.nrows() {
                let (x, y) = (m[(r, i)], m[(r, j)]);
                m[(r, i)] = p * x + q * y;
                m[(r, j)] = q * x + p * y;
            }
        }
    }
}

fn check_ambiguity(singular_values: &[f64], tol: f64) -> Result<()> {
    if let Some(&s) = singular_values
        .iter()
        .find(|&&s| s > tol / AMBIGUITY_FACTOR && s <= tol * AMBIGUITY_FACTOR)
    {
        return Err(Error::AmbiguousRank { value: s, tol });
    }
    Ok(())
}

/// Orthonormal basis (columns) of the eigenvalue-one space of `m`.
fn fixed_basis(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let dim = m.nrows();
    let shifted = m - DMatrix::<f64>::identity(dim, dim);
    let svd = shifted.svd(false, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    check_ambiguity(&sv, tol)?;
    let v_t = svd.v_t.expect("requested right singular vectors");
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= tol).collect();
    let mut basis = DMatrix::zeros(dim, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        basis.set_column(col, &v_t.row(i).transpose());
    }
    Ok(basis)
}

/// Multiplicity of eigenvalue one, `dim ker(M − I)`, at the given tolerance.
pub fn fixed_space_dimension_with_tol(m: &SwapMatrix, tol: f64) -> Result<usize> {
    Ok(fixed_basis(&m.orthonormalized(), tol)?.ncols())
}

pub fn fixed_space_dimension(m: &SwapMatrix) -> Result<usize> {
    fixed_space_dimension_with_tol(m, DEFAULT_RANK_TOL)
}

/// The orthonormalized map with its fixed-space projection removed,
/// `Q = R (1 − P)`.
fn off_fixed_part(m: &SwapMatrix, tol: f64) -> Result<DMatrix<f64>> {
    let r = m.orthonormalized();
    let basis = fixed_basis(&r, tol)?;
    let dim = r.nrows();
    let p = &basis * basis.transpose();
    Ok(&r * (DMatrix::<f64>::identity(dim, dim) - p))
}

/// `1 − σ_max(Q)`: the difference between the two largest singular values of
/// the ensemble map, with singular values taken in the Hilbert–Schmidt metric.
pub fn spectral_gap_swap_with_tol(m: &SwapMatrix, tol: f64) -> Result<f64> {
    let q = off_fixed_part(m, tol)?;
    let sigma = q.singular_values().iter().copied().fold(0.0, f64::max);
    Ok((1.0 - sigma).clamp(0.0, 1.0))
}

pub fn spectral_gap_swap(m: &SwapMatrix) -> Result<f64> {
    spectral_gap_swap_with_tol(m, DEFAULT_RANK_TOL)
}

/// `1 − ρ(Q)` with `ρ` the spectral radius: the asymptotic per-step decay
/// rate of `P_k → P_∞`. Equals [`spectral_gap_swap`] when the map is
/// self-adjoint, and can be larger for correlated sweeps.
pub fn spectral_radius_gap(m: &SwapMatrix) -> Result<f64> {
    let q = off_fixed_part(m, DEFAULT_RANK_TOL)?;
    let rho = q.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((1.0 - rho).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{center_out_order, LocalStructure};
    use approx::assert_abs_diff_eq;

    fn r(sites: &[usize], n: usize) -> Region {
        Region::from_sites(sites.iter().copied(), n).unwrap()
    }

    /// Gram matrix entry by entry, straight from the trace formula.
    fn gram(n: usize, d: u32) -> DMatrix<f64> {
        let dim = 1usize << n;
        DMatrix::from_fn(dim, dim, |a, b| (d as f64).powi(-(((a ^ b) as u64).count_ones() as i32)))
    }

    #[test]
    fn gram_root_squares_to_gram() {
        for d in [2u32, 3] {
            let n = 3;
            let dim = 1 << n;
            let mut h = DMatrix::<f64>::identity(dim, dim);
            let (root, inv) = gram_root_factors(d);
            transform_rows(&mut h, n, root);
            assert!((&h * &h - gram(n, d)).abs().max() < 1e-14);
            let mut hi = DMatrix::<f64>::identity(dim, dim);
            transform_rows(&mut hi, n, inv);
            assert!((&h * &hi - DMatrix::<f64>::identity(dim, dim)).abs().max() < 1e-14);
        }
    }

    #[test]
    fn local_matrix_fixed_columns() {
        // 2^{n-|Ω|+1} columns are unit vectors
        let n = 4;
        let local = r(&[1, 2], n);
        let m = local_matrix(&local, 2).unwrap();
        let fixed = (0..m.dim()).filter(|&a| m.matrix[(a, a)] == 1.0).count();
        assert_eq!(fixed, 8);
        assert_eq!(fixed_space_dimension(&m).unwrap(), 8);
    }

    #[test]
    fn identity_and_full_columns_fixed() {
        let spec = EnsembleSpec::uncorrelated(LocalStructure::complete_graph(4).unwrap(), 3).unwrap();
        let m = build_swap_matrix(&spec).unwrap();
        let last = m.dim() - 1;
        for a in [0, last] {
            for b in 0..m.dim() {
                assert_abs_diff_eq!(m.matrix[(b, a)], if a == b { 1.0 } else { 0.0 }, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mixture_is_self_adjoint_in_hs_metric() {
        let spec = EnsembleSpec::uncorrelated(LocalStructure::path(4).unwrap(), 2).unwrap();
        let m = build_swap_matrix(&spec).unwrap().orthonormalized();
        assert!((&m - m.transpose()).abs().max() < 1e-14);
        // raw region-basis matrix is not symmetric
        let raw = build_swap_matrix(&spec).unwrap().matrix;
        assert!((&raw - raw.transpose()).abs().max() > 1e-3);
    }

    #[test]
    fn projection_gap_is_one() {
        let m = local_matrix(&r(&[0, 1], 3), 2).unwrap();
        assert_abs_diff_eq!(spectral_gap_swap(&m).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn three_site_path_gap() {
        let spec = EnsembleSpec::uncorrelated(LocalStructure::path(3).unwrap(), 2).unwrap();
        let m = build_swap_matrix(&spec).unwrap();
        assert_abs_diff_eq!(spectral_gap_swap(&m).unwrap(), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(spectral_radius_gap(&m).unwrap(), 0.3, epsilon = 1e-10);
        assert_eq!(fixed_space_dimension(&m).unwrap(), 2);
    }

    #[test]
    fn sweep_fixed_space_and_gap_range() {
        let s = LocalStructure::path(5).unwrap();
        let spec = EnsembleSpec::new(s, Policy::sweep(center_out_order(4)), 2).unwrap();
        let m = build_swap_matrix(&spec).unwrap();
        assert_eq!(fixed_space_dimension(&m).unwrap(), 2);
        let g = spectral_gap_swap(&m).unwrap();
        assert!(g > 0.0 && g < 1.0);
        assert!(spectral_radius_gap(&m).unwrap() >= g - 1e-12);
    }

    #[test]
    fn ambiguous_rank_is_reported() {
        let mut m = local_matrix(&r(&[0, 1], 2), 2).unwrap();
        // perturb a fixed column so its singular value lands near the tolerance
        m.matrix[(0, 0)] = 1.0 - 1e-9;
        assert!(matches!(fixed_space_dimension(&m), Err(Error::AmbiguousRank { .. })));
    }

    #[test]
    fn caps_and_policies() {
        let s = LocalStructure::path(15).unwrap();
        let spec = EnsembleSpec::uncorrelated(s.clone(), 2).unwrap();
        assert!(matches!(build_swap_matrix(&spec), Err(Error::CapExceeded(_))));
        let small = LocalStructure::path(3).unwrap();
        let markov = EnsembleSpec::new(small.clone(), Policy::markov_neighbor(&small), 2).unwrap();
        assert!(matches!(build_swap_matrix(&markov), Err(Error::PolicyMismatch { .. })));
    }

    #[test]
    fn matrix_matches_vector_evolution() {
        let s = LocalStructure::path(4).unwrap();
        let spec = EnsembleSpec::new(s, Policy::sweep(vec![2, 0, 1]), 3).unwrap();
        let m = build_swap_matrix(&spec).unwrap();
        let t = SwapVector::swap(r(&[1, 2], 4));
        let via_matrix = m.apply(&t).unwrap();
        let via_vector = crate::dynamics::apply_sweep(&t, &spec).unwrap().to_dense().unwrap();
        for (a, b) in via_matrix.iter().zip(&via_vector) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }
}
