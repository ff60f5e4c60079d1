//! Connected components of the region hypergraph and the infinite-time purity.

use crate::ensemble::LocalStructure;
use crate::error::{Error, Result};
use crate::region::Region;

/// Hyperlink-connected components plus the sites no region touches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub components: Vec<Region>,
    pub residual: Region,
}

impl ComponentDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Union-find over regions that share at least one site.
pub fn connected_components(structure: &LocalStructure) -> ComponentDecomposition {
    let regions = structure.regions();
    let mut sets = DisjointSets::new(regions.len());
    for i in 0..regions.len() {
        for j in i + 1..regions.len() {
            if regions[i].intersects(&regions[j]) {
                sets.union(i, j);
            }
        }
    }
    let mut by_root: Vec<(usize, u64)> = Vec::new();
    for (i, r) in regions.iter().enumerate() {
        let root = sets.find(i);
        match by_root.iter_mut().find(|(rt, _)| *rt == root) {
            Some((_, bits)) => *bits |= r.bits(),
            None => by_root.push((root, r.bits())),
        }
    }
    let n = structure.n();
    let mut components: Vec<Region> = by_root
        .into_iter()
        .map(|(_, bits)| Region::from_bits(bits, n).expect("union of valid regions"))
        .collect();
    components.sort_by_key(|c| c.bits().trailing_zeros());
    let residual = structure.support().complement();
    ComponentDecomposition { components, residual }
}

/// `lim_k P_k` for a pure product state:
/// `Π_i (d^{|C_i|−|Ω_i|} + d^{|Ω_i|}) / (d^{|C_i|} + 1)` with `Ω_i = initial ∩ C_i`.
pub fn purity_infinity(initial: &Region, structure: &LocalStructure, d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::LocalDimension(d));
    }
    if initial.n() != structure.n() {
        return Err(Error::MismatchedSites { left: structure.n(), right: initial.n() });
    }
    let decomposition = connected_components(structure);
    let df = d as f64;
    let mut p = 1.0;
    for c in &decomposition.components {
        let size = c.len() as i32;
        let inside = initial.intersection(c)?.len() as i32;
        p *= (df.powi(-inside) + df.powi(inside - size)) / (1.0 + df.powi(-size));
    }
    Ok(p)
}
