//! Circuit ensembles: the local regions, their weights, and the ordering policy.

use crate::error::{Error, Result};
use crate::region::{Region, MAX_SITES};

pub const WEIGHT_TOL: f64 = 1e-12;

/// The family of local regions together with an optional distribution over it.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalStructure {
    n: usize,
    regions: Vec<Region>,
    weights: Option<Vec<f64>>,
}

fn check_distribution(w: &[f64], len: usize, what: &str) -> Result<()> {
    if w.len() != len {
        return Err(Error::InvalidWeights(format!("{what} has {} entries, expected {len}", w.len())));
    }
    if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidWeights(format!("{what} has entry {bad}")));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidWeights(format!("{what} sums to {total}")));
    }
    Ok(())
}

impl LocalStructure {
    pub fn new(n: usize, regions: Vec<Region>, weights: Option<Vec<f64>>) -> Result<Self> {
        if n > MAX_SITES {
            return Err(Error::TooManySites(n));
        }
        if regions.is_empty() {
            return Err(Error::InvalidEnsemble("no local regions".into()));
        }
        for r in &regions {
            if r.n() != n {
                return Err(Error::MismatchedSites { left: n, right: r.n() });
            }
            if r.is_empty() {
                return Err(Error::InvalidEnsemble("local regions must be nonempty".into()));
            }
        }
        if let Some(w) = &weights {
            check_distribution(w, regions.len(), "weights")?;
        }
        Ok(Self { n, regions, weights })
    }

    /// Regions given as site lists.
    pub fn from_site_lists(n: usize, lists: &[Vec<usize>], weights: Option<Vec<f64>>) -> Result<Self> {
        let regions = lists
            .iter()
            .map(|l| Region::from_sites(l.iter().copied(), n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, regions, weights)
    }

    /// Nearest-neighbour edges `{i, i+1}` of an open chain, uniform weights.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("path needs at least 2 sites, got {n}")));
        }
        let regions = (0..n - 1).map(|i| Region::from_sites([i, i + 1], n)).collect::<Result<_>>()?;
        Self::new(n, regions, None)
    }

    /// All pairs `{i, j}`, uniform weights.
    pub fn complete_graph(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("complete graph needs at least 2 sites, got {n}")));
        }
        let mut regions = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                regions.push(Region::from_sites([i, j], n)?);
            }
        }
        Self::new(n, regions, None)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn explicit_weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Effective weights; uniform when none were given.
    pub fn weights(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => w.clone(),
            None => vec![1.0 / self.regions.len() as f64; self.regions.len()],
        }
    }

    /// Union of all regions.
    pub fn support(&self) -> Region {
        let bits = self.regions.iter().fold(0u64, |acc, r| acc | r.bits());
        Region::from_bits(bits, self.n).expect("regions fit the universe")
    }
}

/// How region sequences are drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum Policy {
    /// Independent draws; `per_step` overrides the structure weights with
    /// one distribution per time step.
    Uncorrelated { per_step: Option<Vec<Vec<f64>>> },
    /// Time-independent Markov chain. `transition[i][j]` is the probability
    /// that region `j` follows region `i`, so rows sum to one.
    Markov { initial: Vec<f64>, transition: Vec<Vec<f64>> },
    /// Deterministic sweep over all regions; `order[0]` is the first map
    /// applied to the swap vector in each sweep.
    CorrelatedSweep { order: Vec<usize> },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Uncorrelated { .. } => "uncorrelated",
            Policy::Markov { .. } => "markov",
            Policy::CorrelatedSweep { .. } => "sweep",
        }
    }

    pub fn uncorrelated() -> Self {
        Policy::Uncorrelated { per_step: None }
    }

    /// Markov chain that moves uniformly to any region sharing a site with
    /// the current one (the current region included), started uniformly.
    pub fn markov_neighbor(structure: &LocalStructure) -> Self {
        let m = structure.len();
        let regions = structure.regions();
        let transition = (0..m)
            .map(|i| {
                let nb: Vec<bool> = regions.iter().map(|r| r.intersects(&regions[i])).collect();
                let count = nb.iter().filter(|&&b| b).count() as f64;
                nb.iter().map(|&b| if b { 1.0 / count } else { 0.0 }).collect()
            })
            .collect();
        Policy::Markov { initial: vec![1.0 / m as f64; m], transition }
    }

    pub fn sweep(order: Vec<usize>) -> Self {
        Policy::CorrelatedSweep { order }
    }
}

/// Staircase sweep `0, 1, …, m-1`: on a chain every gate extends the block
/// the previous gates have already scrambled. This is the expanding sweep.
pub fn expanding_order(m: usize) -> Vec<usize> {
    (0..m).collect()
}

/// Center-out sweep over `m` chain edges: start at the middle edge and grow
/// the covered block alternately to the right and to the left.
pub fn center_out_order(m: usize) -> Vec<usize> {
    if m == 0 {
        return Vec::new();
    }
    let c = (m - 1) / 2;
    let mut order = vec![c];
    let (mut left, mut right) = (c as isize - 1, c + 1);
    while order.len() < m {
        if right < m {
            order.push(right);
            right += 1;
        }
        if left >= 0 {
            order.push(left as usize);
            left -= 1;
        }
    }
    order
}

/// A complete circuit ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    structure: LocalStructure,
    policy: Policy,
    d: u32,
}

impl EnsembleSpec {
    pub fn new(structure: LocalStructure, policy: Policy, d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::LocalDimension(d));
        }
        let m = structure.len();
        match &policy {
            Policy::Uncorrelated { per_step: Some(steps) } => {
                if steps.is_empty() {
                    return Err(Error::InvalidWeights("empty per-step weight sequence".into()));
                }
                for (j, w) in steps.iter().enumerate() {
                    check_distribution(w, m, &format!("step {j} weights"))?;
                }
            }
            Policy::Uncorrelated { per_step: None } => {}
            Policy::Markov { initial, transition } => {
                check_distribution(initial, m, "initial distribution")?;
                if transition.len() != m {
                    return Err(Error::InvalidEnsemble(format!(
                        "transition matrix has {} rows, expected {m}",
                        transition.len()
                    )));
                }
                for (i, row) in transition.iter().enumerate() {
                    check_distribution(row, m, &format!("transition row {i}"))
                        .map_err(|e| Error::InvalidEnsemble(format!("non-stochastic matrix: {e}")))?;
                }
            }
            Policy::CorrelatedSweep { order } => {
                let mut seen = vec![false; m];
                if order.len() != m {
                    return Err(Error::InvalidEnsemble(format!(
                        "sweep order has {} entries, expected {m}",
                        order.len()
                    )));
                }
                for &i in order {
                    if i >= m || seen[i] {
                        return Err(Error::InvalidEnsemble(format!("sweep order is not a permutation: {order:?}")));
                    }
                    seen[i] = true;
                }
            }
        }
        Ok(Self { structure, policy, d })
    }

    pub fn uncorrelated(structure: LocalStructure, d: u32) -> Result<Self> {
        Self::new(structure, Policy::uncorrelated(), d)
    }

    pub fn structure(&self) -> &LocalStructure {
        &self.structure
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.structure.n()
    }

    /// Weights used by the uncorrelated step with the given index.
    pub(crate) fn step_weights(&self, step_index: usize) -> Result<Vec<f64>> {
        match &self.policy {
            Policy::Uncorrelated { per_step: None } => Ok(self.structure.weights()),
            Policy::Uncorrelated { per_step: Some(steps) } => steps
                .get(step_index)
                .cloned()
                .ok_or(Error::StepOutOfRange { index: step_index, len: steps.len() }),
            _ => Err(Error::PolicyMismatch { expected: "uncorrelated" }),
        }
    }
}
