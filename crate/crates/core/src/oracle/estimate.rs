use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::haar::{haar_unitary, sample_stream, SamplingPlan};
use super::state::{checked_dim, DenseState};
use super::{MomentEstimate, OracleConfig, MAX_OPERATOR_DIM};
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::region::Region;

type CMatrix = DMatrix<Complex64>;

/// Streams for the global-Haar reference ensemble live in the upper half of
/// the stream space so they never collide with circuit samples.
const REFERENCE_STREAM: u64 = 1 << 63;
const BLOCK: usize = 64;

fn check_config(spec: &EnsembleSpec, region: &Region, cfg: &OracleConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.n != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), actual: cfg.n });
    }
    if cfg.d != spec.d() {
        return Err(Error::DimensionMismatch { expected: spec.d() as usize, actual: cfg.d as usize });
    }
    if region.n() != spec.n() {
        return Err(Error::MismatchedSites { left: spec.n(), right: region.n() });
    }
    Ok(())
}

/// Runs one sampled circuit from `|0…0⟩`, calling `observe` before the first
/// step and after each step.
fn run_circuit<F>(spec: &EnsembleSpec, plan: &SamplingPlan, seed: u64, index: u64, k: usize, mut observe: F) -> Result<()>
where
    F: FnMut(usize, &DenseState) -> Result<()>,
{
    let mut rng = sample_stream(seed, index);
    let mut state = DenseState::zero_product(spec.n(), spec.d())?;
    let mut seq = plan.sequence();
    observe(0, &state)?;
    for step in 1..=k {
        for region in seq.next_step(&mut rng)? {
            let gate = haar_unitary(spec.d().pow(region.len() as u32) as usize, &mut rng);
            state.apply_gate(&region, &gate)?;
        }
        observe(step, &state)?;
    }
    Ok(())
}

fn collect_samples<F>(cfg: &OracleConfig, exec: Execution, per_sample: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync + Send,
{
    map_range(cfg.samples, exec, |i| per_sample(i as u64)).into_iter().collect()
}

/// Monte Carlo `P_k` for `k = 0..=k_max`, all from the same sampled circuits.
pub fn mc_purity_trajectory_with(
    spec: &EnsembleSpec,
    region: &Region,
    k_max: usize,
    cfg: &OracleConfig,
    exec: Execution,
) -> Result<Vec<MomentEstimate>> {
    check_config(spec, region, cfg)?;
    checked_dim(spec.n(), spec.d(), super::MAX_STATE_DIM)?;
    let plan = SamplingPlan::new(spec)?;
    let rows = collect_samples(cfg, exec, |i| {
        let mut out = Vec::with_capacity(k_max + 1);
        run_circuit(spec, &plan, cfg.seed, i, k_max, |_, s| {
            out.push(s.reduced_purity(region)?);
            Ok(())
        })?;
        Ok(out)
    })?;
    (0..=k_max)
        .map(|k| MomentEstimate::from_samples(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect()
}

pub fn mc_purity_trajectory(spec: &EnsembleSpec, region: &Region, k_max: usize, cfg: &OracleConfig) -> Result<Vec<MomentEstimate>> {
    mc_purity_trajectory_with(spec, region, k_max, cfg, Execution::default())
}

/// Monte Carlo estimate of the average purity of `region` after `k` steps.
pub fn mc_average_purity(spec: &EnsembleSpec, region: &Region, k: usize, cfg: &OracleConfig) -> Result<MomentEstimate> {
    Ok(mc_purity_trajectory(spec, region, k, cfg)?.pop().expect("k_max + 1 entries"))
}

/// `Σ |eigenvalues|` of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
}

/// Monte Carlo average of `‖ω_Ω − 1/d^{|Ω|}‖₁` after `k` steps.
pub fn mc_trace_distance(spec: &EnsembleSpec, region: &Region, k: usize, cfg: &OracleConfig) -> Result<MomentEstimate> {
    check_config(spec, region, cfg)?;
    let m = checked_dim(region.len(), spec.d(), MAX_OPERATOR_DIM)?;
    let plan = SamplingPlan::new(spec)?;
    let values = collect_samples(cfg, Execution::default(), |i| {
        let mut out = 0.0;
        run_circuit(spec, &plan, cfg.seed, i, k, |step, s| {
            if step == k {
                let rho = s.reduced_density(region)?;
                let mixed = CMatrix::identity(m, m) / Complex64::new(m as f64, 0.0);
                out = trace_norm_hermitian(&(rho - mixed));
            }
            Ok(())
        })?;
        Ok(vec![out])
    })?;
    MomentEstimate::from_samples(&values.into_iter().map(|v| v[0]).collect::<Vec<_>>())
}

/// Sample mean of a matrix-valued quantity with per-entry standard errors
/// (real and imaginary parts stored separately in `stderr`).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixEstimate {
    pub mean: CMatrix,
    pub stderr: CMatrix,
    pub samples: usize,
}

impl MatrixEstimate {
    /// `√D · ‖stderr‖_F`: a scale for the trace-norm error of `mean`.
    pub fn trace_norm_error(&self) -> f64 {
        let frob: f64 = self.stderr.iter().map(|z| z.re * z.re + z.im * z.im).sum::<f64>().sqrt();
        (self.mean.nrows() as f64).sqrt() * frob
    }
}

/// Mean of `f(0..samples)` accumulated in fixed index blocks, so the result
/// does not depend on scheduling.
pub fn average_operator<F>(samples: usize, dim: usize, exec: Execution, f: F) -> Result<MatrixEstimate>
where
    F: Fn(u64) -> Result<CMatrix> + Sync + Send,
{
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    let blocks = samples.div_ceil(BLOCK);
    let partial = map_range(blocks, exec, |b| -> Result<(CMatrix, CMatrix)> {
        let mut sum = CMatrix::zeros(dim, dim);
        let mut sq = CMatrix::zeros(dim, dim);
        for i in b * BLOCK..((b + 1) * BLOCK).min(samples) {
            let x = f(i as u64)?;
            if x.nrows() != dim || x.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: x.nrows() });
            }
            sq += x.map(|z| Complex64::new(z.re * z.re, z.im * z.im));
            sum += x;
        }
        Ok((sum, sq))
    });
    let mut sum = CMatrix::zeros(dim, dim);
    let mut sq = CMatrix::zeros(dim, dim);
    for p in partial {
        let (s, q) = p?;
        sum += s;
        sq += q;
    }
    let nf = samples as f64;
    let mean = sum / Complex64::new(nf, 0.0);
    let var = |s2: f64, m: f64| ((s2 / nf - m * m) * nf / (nf - 1.0)).max(0.0);
    let stderr = CMatrix::from_fn(dim, dim, |i, j| {
        let (m, q) = (mean[(i, j)], sq[(i, j)]);
        Complex64::new((var(q.re, m.re) / nf).sqrt(), (var(q.im, m.im) / nf).sqrt())
    });
    Ok(MatrixEstimate { mean, stderr, samples })
}

fn tensor_power(rho: &CMatrix, t: usize) -> CMatrix {
    let mut out = rho.clone();
    for _ in 1..t {
        out = out.kronecker(rho);
    }
    out
}

/// Monte Carlo `t`-design distance of the region's marginal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignDistance {
    /// `‖E_circuit ω_Ω^{⊗t} − E_Haar ω_Ω^{⊗t}‖₁` of the two sample means.
    pub value: f64,
    pub circuit_error: f64,
    pub reference_error: f64,
    pub samples: usize,
}

/// `E ω_Ω^{⊗t}` over circuits of `k` steps.
pub fn circuit_moment(spec: &EnsembleSpec, region: &Region, k: usize, t: usize, cfg: &OracleConfig) -> Result<MatrixEstimate> {
    check_config(spec, region, cfg)?;
    let dim = design_dim(region, spec.d(), t)?;
    let plan = SamplingPlan::new(spec)?;
    average_operator(cfg.samples, dim, Execution::default(), |i| {
        let mut out = None;
        run_circuit(spec, &plan, cfg.seed, i, k, |step, s| {
            if step == k {
                out = Some(tensor_power(&s.reduced_density(region)?, t));
            }
            Ok(())
        })?;
        Ok(out.expect("observed final step"))
    })
}

/// `E ω_Ω^{⊗t}` over global Haar-random states.
pub fn haar_moment(region: &Region, t: usize, cfg: &OracleConfig) -> Result<MatrixEstimate> {
    cfg.validate()?;
    if region.n() != cfg.n {
        return Err(Error::MismatchedSites { left: cfg.n, right: region.n() });
    }
    let dim = design_dim(region, cfg.d, t)?;
    average_operator(cfg.samples, dim, Execution::default(), |i| {
        let mut rng = sample_stream(cfg.seed, REFERENCE_STREAM | i);
        let s = DenseState::haar_random(cfg.n, cfg.d, &mut rng)?;
        Ok(tensor_power(&s.reduced_density(region)?, t))
    })
}

fn design_dim(region: &Region, d: u32, t: usize) -> Result<usize> {
    if t == 0 {
        return Err(Error::InvalidParameter("design order t must be >= 1".into()));
    }
    checked_dim(region.len() * t, d, MAX_OPERATOR_DIM)
}

pub fn mc_design_distance(spec: &EnsembleSpec, region: &Region, k: usize, t: usize, cfg: &OracleConfig) -> Result<DesignDistance> {
    let circuit = circuit_moment(spec, region, k, t, cfg)?;
    let reference = haar_moment(region, t, cfg)?;
    Ok(DesignDistance {
        value: trace_norm_hermitian(&(&circuit.mean - &reference.mean)),
        circuit_error: circuit.trace_norm_error(),
        reference_error: reference.trace_norm_error(),
        samples: cfg.samples,
    })
}
