use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ensemble::{EnsembleSpec, Policy};
use crate::error::{Error, Result};
use crate::region::Region;

/// Independent random stream for work item `index` under `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-distributed `m × m` unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(m, m, |_, _| gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..m {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniformly random unit vector in `C^dim`.
pub fn haar_state_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

fn weighted(w: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(w).map_err(|e| Error::InvalidWeights(e.to_string()))
}

enum Plan {
    Fixed(WeightedIndex<f64>),
    PerStep(Vec<WeightedIndex<f64>>),
    Markov { initial: WeightedIndex<f64>, rows: Vec<WeightedIndex<f64>> },
    /// One sweep in time order.
    Sweep(Vec<usize>),
}

/// Precomputed samplers for an ensemble, shared by all Monte Carlo samples.
pub struct SamplingPlan<'a> {
    spec: &'a EnsembleSpec,
    plan: Plan,
}

impl<'a> SamplingPlan<'a> {
    pub fn new(spec: &'a EnsembleSpec) -> Result<Self> {
        let plan = match spec.policy() {
            Policy::Uncorrelated { per_step: None } => Plan::Fixed(weighted(&spec.structure().weights())?),
            Policy::Uncorrelated { per_step: Some(steps) } => {
                Plan::PerStep(steps.iter().map(|w| weighted(w)).collect::<Result<_>>()?)
            }
            Policy::Markov { initial, transition } => Plan::Markov {
                initial: weighted(initial)?,
                rows: transition.iter().map(|w| weighted(w)).collect::<Result<_>>()?,
            },
            // order[0] acts first on the swap vector, so it is the last gate in time
            Policy::CorrelatedSweep { order } => Plan::Sweep(order.iter().rev().copied().collect()),
        };
        Ok(Self { spec, plan })
    }

    /// Gates per step: one, or a full sweep.
    pub fn gates_per_step(&self) -> usize {
        match &self.plan {
            Plan::Sweep(o) => o.len(),
            _ => 1,
        }
    }

    pub fn sequence(&self) -> RegionSequence<'_, 'a> {
        RegionSequence { plan: self, step: 0, current: None }
    }
}

/// Lazily drawn region sequence in time order. Drawing step by step keeps
/// every prefix distributed like a shorter circuit.
pub struct RegionSequence<'p, 'a> {
    plan: &'p SamplingPlan<'a>,
    step: usize,
    current: Option<usize>,
}

impl RegionSequence<'_, '_> {
    /// Regions of the next step, in time order.
    pub fn next_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Vec<Region>> {
        let regions = self.plan.spec.structure().regions();
        let idx: Vec<usize> = match &self.plan.plan {
            Plan::Fixed(w) => vec![w.sample(rng)],
            Plan::PerStep(ws) => {
                let w = ws.get(self.step).ok_or(Error::StepOutOfRange { index: self.step, len: ws.len() })?;
                vec![w.sample(rng)]
            }
            Plan::Markov { initial, rows } => {
                let next = match self.current {
                    None => initial.sample(rng),
                    Some(c) => rows[c].sample(rng),
                };
                self.current = Some(next);
                vec![next]
            }
            Plan::Sweep(order) => order.clone(),
        };
        self.step += 1;
        Ok(idx.into_iter().map(|i| regions[i]).collect())
    }
}

/// Time-ordered regions of a `k`-step circuit.
pub fn sample_regions<R: Rng + ?Sized>(spec: &EnsembleSpec, k: usize, rng: &mut R) -> Result<Vec<Region>> {
    let plan = SamplingPlan::new(spec)?;
    let mut seq = plan.sequence();
    let mut out = Vec::with_capacity(k * plan.gates_per_step());
    for _ in 0..k {
        out.extend(seq.next_step(rng)?);
    }
    Ok(out)
}
