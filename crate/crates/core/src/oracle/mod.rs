//! Brute-force Hilbert-space reference: dense states, Haar-random gates,
//! Monte Carlo estimators and exact moment twirls for small systems.

mod estimate;
mod haar;
mod moments;
mod state;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::pairwise_sum;

pub use estimate::{
    average_operator, circuit_moment, haar_moment, mc_average_purity, mc_design_distance, mc_purity_trajectory,
    mc_purity_trajectory_with, mc_trace_distance, trace_norm_hermitian, DesignDistance, MatrixEstimate,
};
pub use haar::{haar_state_vector, haar_unitary, sample_regions, sample_stream, RegionSequence, SamplingPlan};
pub use moments::{dense_swap, embed_gate, exact_first_moment_map, exact_second_moment_projection};
pub use state::{apply_gate, reduced_purity, DenseState};

/// Largest state dimension `d^n`.
pub const MAX_STATE_DIM: usize = 1 << 20;
/// Largest side of a dense operator (single- or two-copy).
pub const MAX_OPERATOR_DIM: usize = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
    pub samples: usize,
}

impl MomentEstimate {
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
        }
        let mean = pairwise_sum(values) / n as f64;
        let dev: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&dev) / (n - 1) as f64;
        Ok(Self { mean, stderr: (var / n as f64).sqrt(), samples: n })
    }

    /// Whether `value` lies within `sigmas` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.stderr + 1e-14
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub seed: u64,
    pub samples: usize,
    pub d: u32,
    pub n: usize,
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 samples, got {}", self.samples)));
        }
        state::checked_dim(self.n, self.d, MAX_STATE_DIM).map(|_| ())
    }
}
