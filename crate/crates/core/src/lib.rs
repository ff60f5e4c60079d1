//! Average purity dynamics of local random quantum circuits.
//!
//! Averaged second moments of a circuit built from Haar-random local gates
//! live in the span of swap operators `T_A`, one per region `A` of the site
//! set. Each local gate acts on that span by a closed two-term rule, so the
//! average purity of any region is a coefficient sum that can be tracked
//! without ever building a state.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod fixed;
pub mod oracle;
pub mod par;
pub mod path1d;
pub mod region;
pub mod spectral;
pub mod swap;

pub use dynamics::{apply_step, apply_sweep, evolve, markov_purity, purity_trajectory};
pub use ensemble::{EnsembleSpec, LocalStructure, Policy};
pub use error::{Error, Result};
pub use fixed::{connected_components, purity_infinity, ComponentDecomposition};
pub use par::Execution;
pub use path1d::PathParams;
pub use region::Region;
pub use spectral::{build_swap_matrix, fixed_space_dimension, spectral_gap_swap, SwapMatrix};
pub use swap::{alpha_coefficients, SwapVector};
