//! Exact first- and second-moment twirls on dense operators.
//!
//! Two-copy operators act on `H ⊗ H` with flat index `i₁ + D·i₂`, where
//! `D = d^n` and `i₁`, `i₂` are single-copy indices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{checked_dim, Split};
use super::MAX_OPERATOR_DIM;
use crate::error::{Error, Result};
use crate::region::Region;

type CMatrix = DMatrix<Complex64>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn check_square(op: &CMatrix, dim: usize) -> Result<()> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: op.nrows() });
    }
    Ok(())
}

/// Offsets of a region (or its complement) on the two-copy space.
fn two_copy(offsets: &[usize], dim: usize) -> Vec<usize> {
    let m = offsets.len();
    (0..m * m).map(|r| offsets[r % m] + dim * offsets[r / m]).collect()
}

/// `X ↦ d^{−|Ω|} 1_Ω ⊗ Tr_Ω X`.
pub fn exact_first_moment_map(op: &CMatrix, region: &Region, d: u32) -> Result<CMatrix> {
    let dim = checked_dim(region.n(), d, MAX_OPERATOR_DIM)?;
    check_square(op, dim)?;
    let split = Split::new(region, d);
    let m = split.inside.len();
    let mut out = CMatrix::zeros(dim, dim);
    for &c in &split.outside {
        for &c2 in &split.outside {
            let tr: Complex64 = split.inside.iter().map(|&s| op[(s + c, s + c2)]).sum();
            let v = tr / m as f64;
            for &a in &split.inside {
                out[(a + c, a + c2)] = v;
            }
        }
    }
    Ok(out)
}

/// Dense two-copy swap `T_A`: exchanges the copies on the sites of `A`.
pub fn dense_swap(region: &Region, d: u32) -> Result<CMatrix> {
    let dim = checked_dim(region.n(), d, MAX_OPERATOR_DIM)?;
    checked_dim(2 * region.n(), d, MAX_OPERATOR_DIM)?;
    let split = Split::new(region, d);
    let mut t = CMatrix::zeros(dim * dim, dim * dim);
    for &a1 in &split.inside {
        for &a2 in &split.inside {
            for &c1 in &split.outside {
                for &c2 in &split.outside {
                    let input = a1 + c1 + dim * (a2 + c2);
                    let output = a2 + c1 + dim * (a1 + c2);
                    t[(output, input)] = Complex64::new(1.0, 0.0);
                }
            }
        }
    }
    Ok(t)
}

/// `F_± = (1 ± T)/√(2m(m ± 1))` on the region's two-copy factor, `m = d^{|Ω|}`.
fn f_pair(m: usize) -> [CMatrix; 2] {
    let mf = m as f64;
    let build = |sign: f64| {
        let norm = (2.0 * mf * (mf + sign)).sqrt();
        CMatrix::from_fn(m * m, m * m, |r, s| {
            let id = if r == s { 1.0 } else { 0.0 };
            let swap = if r % m == s / m && r / m == s % m { 1.0 } else { 0.0 };
            Complex64::new((id + sign * swap) / norm, 0.0)
        })
    };
    [build(1.0), build(-1.0)]
}

/// Average of `(U_Ω^†)^{⊗2} X U_Ω^{⊗2}` over Haar `U_Ω`: projects the region's
/// two-copy factor onto `span{1, T_Ω}` and leaves the rest untouched.
pub fn exact_second_moment_projection(op: &CMatrix, region: &Region, d: u32) -> Result<CMatrix> {
    let dim = checked_dim(region.n(), d, MAX_OPERATOR_DIM)?;
    let dim2 = checked_dim(2 * region.n(), d, MAX_OPERATOR_DIM)?;
    check_square(op, dim2)?;
    let split = Split::new(region, d);
    let inside = two_copy(&split.inside, dim);
    let outside = two_copy(&split.outside, dim);
    let mut out = CMatrix::zeros(dim2, dim2);
    for f in f_pair(split.inside.len()) {
        // Z[c, c'] = Σ_{s,s'} F[s, s'] X[(s', c), (s, c')]
        let mut z = CMatrix::zeros(outside.len(), outside.len());
        for (ci, &c) in outside.iter().enumerate() {
            for (cj, &c2) in outside.iter().enumerate() {
                let mut acc = zero();
                for (si, &s) in inside.iter().enumerate() {
                    for (sj, &s2) in inside.iter().enumerate() {
                        let fv = f[(si, sj)];
                        if fv.re != 0.0 {
                            acc += fv * op[(s2 + c, s + c2)];
                        }
                    }
                }
                z[(ci, cj)] = acc;
            }
        }
        for (ri, &r) in inside.iter().enumerate() {
            for (rj, &r2) in inside.iter().enumerate() {
                let fv = f[(ri, rj)];
                if fv.re == 0.0 {
                    continue;
                }
                for (ci, &c) in outside.iter().enumerate() {
                    for (cj, &c2) in outside.iter().enumerate() {
                        out[(r + c, r2 + c2)] += fv * z[(ci, cj)];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `U_Ω ⊗ 1` as a full `d^n × d^n` matrix.
pub fn embed_gate(gate: &CMatrix, region: &Region, d: u32) -> Result<CMatrix> {
    let dim = checked_dim(region.n(), d, MAX_OPERATOR_DIM)?;
    let split = Split::new(region, d);
    check_square(gate, split.inside.len())?;
    let mut full = CMatrix::zeros(dim, dim);
    for &c in &split.outside {
        for (i, &a) in split.inside.iter().enumerate() {
            for (j, &b) in split.inside.iter().enumerate() {
                full[(a + c, b + c)] = gate[(i, j)];
            }
        }
    }
    Ok(full)
}
