//! Experiment configuration: a single JSON document with 0-based site indices.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lrqc::ensemble::{center_out_order, expanding_order};
use lrqc::{EnsembleSpec, LocalStructure, Policy, Region};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub policy: PolicyConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path1d: Option<PathConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsConfig>,
}

/// Either a named `structure` or explicit `regions`, never both.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    /// Nearest-neighbour edges `{i, i+1}`.
    Path,
    /// Every pair of sites.
    Complete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    /// Staircase `0, 1, …, m−1`.
    Expanding,
    CenterOut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    Uncorrelated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        per_step: Option<Vec<Vec<f64>>>,
    },
    /// `matrix[i][j]` is the probability that region `j` follows region `i`.
    Markov { matrix: Vec<Vec<f64>>, initial: Vec<f64> },
    /// Uniform moves to any region sharing a site with the current one.
    MarkovNeighbor,
    /// `permutation[0]` is applied first to the swap vector in each sweep.
    Sweep {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        permutation: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<SweepOrder>,
    },
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig::Uncorrelated { per_step: None }
    }
}

fn default_k_max() -> usize {
    10
}

fn default_samples() -> usize {
    1000
}

fn default_epsilon() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub initial_region: Vec<usize>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Adds the area-law bound column to `evolve`.
    #[serde(default)]
    pub bound: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Size sweep for `gap`: one row per (size, policy).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapSweep {
    pub sizes: Vec<usize>,
    pub structure: StructureKind,
    pub policies: Vec<PolicyConfig>,
}

/// Overrides for `path1d`; by default the chain is `model.n` long and the
/// cut sits after the initial region, which must be a prefix `{0, …, l−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub length: usize,
    pub cut: usize,
}

fn default_alpha() -> f64 {
    1.0
}

fn default_t() -> usize {
    2
}

fn default_norm() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_t")]
    pub t: usize,
    #[serde(default = "default_norm")]
    pub omega_norm: f64,
    #[serde(default = "default_norm")]
    pub a_norm: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { alpha: default_alpha(), t: default_t(), omega_norm: default_norm(), a_norm: default_norm() }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn structure(&self) -> Result<LocalStructure, CliError> {
        let m = &self.model;
        let s = match (&m.structure, &m.regions) {
            (Some(kind), None) => {
                let s = named_structure(*kind, m.n)?;
                match &m.weights {
                    Some(w) => LocalStructure::new(m.n, s.regions().to_vec(), Some(w.clone()))?,
                    None => s,
                }
            }
            (None, Some(lists)) => LocalStructure::from_site_lists(m.n, lists, m.weights.clone())?,
            (Some(_), Some(_)) => return Err(CliError::Validation("model: give either structure or regions, not both".into())),
            (None, None) => return Err(CliError::Validation("model: one of structure or regions is required".into())),
        };
        Ok(s)
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec, CliError> {
        let s = self.structure()?;
        let policy = self.policy.to_policy(&s)?;
        Ok(EnsembleSpec::new(s, policy, self.model.d)?)
    }

    pub fn initial_region(&self) -> Result<Region, CliError> {
        Ok(Region::from_sites(self.run.initial_region.iter().copied(), self.model.n)?)
    }

    pub fn bounds_config(&self) -> BoundsConfig {
        self.bounds.clone().unwrap_or_default()
    }

    /// Checks everything a command could trip over before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        self.ensemble()?;
        self.initial_region()?;
        if !(self.run.epsilon > 0.0 && self.run.epsilon.is_finite()) {
            return Err(CliError::Validation(format!("run.epsilon must be positive, got {}", self.run.epsilon)));
        }
        if let Some(sweep) = &self.gap {
            if sweep.sizes.is_empty() || sweep.policies.is_empty() {
                return Err(CliError::Validation("gap: sizes and policies must be nonempty".into()));
            }
        }
        let b = self.bounds_config();
        if !(b.alpha > 0.0) || b.t == 0 || !(b.omega_norm > 0.0) || !(b.a_norm > 0.0) {
            return Err(CliError::Validation("bounds: alpha, t and norms must be positive".into()));
        }
        Ok(())
    }
}

pub fn named_structure(kind: StructureKind, n: usize) -> Result<LocalStructure, CliError> {
    Ok(match kind {
        StructureKind::Path => LocalStructure::path(n)?,
        StructureKind::Complete => LocalStructure::complete_graph(n)?,
    })
}

impl PolicyConfig {
    pub fn to_policy(&self, s: &LocalStructure) -> Result<Policy, CliError> {
        Ok(match self {
            PolicyConfig::Uncorrelated { per_step } => Policy::Uncorrelated { per_step: per_step.clone() },
            PolicyConfig::Markov { matrix, initial } => {
                Policy::Markov { initial: initial.clone(), transition: matrix.clone() }
            }
            PolicyConfig::MarkovNeighbor => Policy::markov_neighbor(s),
            PolicyConfig::Sweep { permutation, order } => match (permutation, order) {
                (Some(p), None) => Policy::sweep(p.clone()),
                (None, Some(SweepOrder::Expanding)) | (None, None) => Policy::sweep(expanding_order(s.len())),
                (None, Some(SweepOrder::CenterOut)) => Policy::sweep(center_out_order(s.len())),
                (Some(_), Some(_)) => {
                    return Err(CliError::Validation("sweep: give either permutation or order, not both".into()))
                }
            },
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::Uncorrelated { .. } => "uncorrelated",
            PolicyConfig::Markov { .. } => "markov",
            PolicyConfig::MarkovNeighbor => "markov_neighbor",
            PolicyConfig::Sweep { .. } => "sweep",
        }
    }

    /// Sweep label: the named order or the permutation joined by `-`.
    pub fn order_label(&self) -> String {
        match self {
            PolicyConfig::Sweep { permutation: Some(p), .. } => {
                p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-")
            }
            PolicyConfig::Sweep { order: Some(SweepOrder::CenterOut), .. } => "center_out".into(),
            PolicyConfig::Sweep { .. } => "expanding".into(),
            _ => String::new(),
        }
    }
}
