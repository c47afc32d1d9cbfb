use std::ops::Range;

use super::{Graph, GraphError, VertexId, Weight};
use crate::sweep;

/// 1D block distribution of `n_vertices` over `n_parts` ranks. Every rank
/// owns a contiguous range of `block = ceil(n / p)` vertices; the last
/// range may be short (or empty).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionLayout {
    n_vertices: usize,
    n_parts: usize,
    block: usize,
}

impl PartitionLayout {
    pub fn new(n_vertices: usize, n_parts: usize) -> Result<Self, GraphError> {
        if n_parts == 0 || n_parts > n_vertices {
            return Err(GraphError::PartsOutOfRange { p: n_parts, n: n_vertices });
        }
        Ok(PartitionLayout { n_vertices, n_parts, block: n_vertices.div_ceil(n_parts) })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_parts(&self) -> usize {
        self.n_parts
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn owner(&self, v: VertexId) -> Result<usize, GraphError> {
        if v as usize >= self.n_vertices {
            return Err(GraphError::VertexOutOfRange { v: v.into(), n: self.n_vertices });
        }
        Ok(self.owner_unchecked(v))
    }

    #[inline]
    pub(crate) fn owner_unchecked(&self, v: VertexId) -> usize {
        v as usize / self.block
    }

    /// Vertex ids owned by `rank`.
    pub fn range(&self, rank: usize) -> Range<usize> {
        let lo = (rank * self.block).min(self.n_vertices);
        let hi = ((rank + 1) * self.block).min(self.n_vertices);
        lo..hi
    }
}

/// One rank's share of the graph: out-edges of its owned vertices. Targets
/// may be ghosts owned by other ranks.
///
/// Edges carry a liveness flag so pruning can delete in place without
/// shifting indices under a resumable cursor; [`Partition::compact`] drops
/// dead slots.
#[derive(Debug, Clone)]
pub struct Partition {
    part_id: usize,
    layout: PartitionLayout,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<Weight>,
    live: Vec<bool>,
    n_live: usize,
    n_interedges: usize,
}

impl Partition {
    fn extract(g: &Graph, layout: PartitionLayout, part_id: usize) -> Self {
        let range = layout.range(part_id);
        let mut offsets = Vec::with_capacity(range.len() + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for u in range {
            for (v, w) in g.neighbors(u as VertexId) {
                targets.push(v);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let n_interedges =
            targets.iter().filter(|&&v| layout.owner_unchecked(v) != part_id).count();
        let m = targets.len();
        Partition {
            part_id,
            layout,
            offsets,
            targets,
            weights,
            live: vec![true; m],
            n_live: m,
            n_interedges,
        }
    }

    pub fn part_id(&self) -> usize {
        self.part_id
    }

    pub fn layout(&self) -> &PartitionLayout {
        &self.layout
    }

    pub fn owned(&self) -> Range<usize> {
        self.layout.range(self.part_id)
    }

    pub fn n_owned(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn is_owned(&self, v: VertexId) -> bool {
        self.owned().contains(&(v as usize))
    }

    /// Position of owned vertex `v` in the local tables.
    #[inline]
    pub fn local_index(&self, v: VertexId) -> usize {
        v as usize - self.owned().start
    }

    pub fn n_interedges(&self) -> usize {
        self.n_interedges
    }

    /// Number of live local edges.
    pub fn n_edges(&self) -> usize {
        self.n_live
    }

    /// Slot range of the out-edges of the owned vertex at local index `i`,
    /// dead slots included.
    #[inline]
    pub(crate) fn slots(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    #[inline]
    pub(crate) fn slot(&self, e: usize) -> Option<(VertexId, Weight)> {
        self.live[e].then(|| (self.targets[e], self.weights[e]))
    }

    /// Live out-edges of owned vertex `u`.
    pub fn neighbors(&self, u: VertexId) -> impl Iterator<Item = (VertexId, Weight)> + '_ {
        self.slots(self.local_index(u)).filter_map(|e| self.slot(e))
    }

    pub fn out_degree(&self, u: VertexId) -> usize {
        self.slots(self.local_index(u)).filter(|&e| self.live[e]).count()
    }

    /// All live edges as `(source, target, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Weight)> + '_ {
        self.owned()
            .flat_map(move |u| self.neighbors(u as VertexId).map(move |(v, w)| (u as VertexId, v, w)))
    }

    pub(crate) fn delete(&mut self, e: usize) {
        if std::mem::replace(&mut self.live[e], false) {
            self.n_live -= 1;
            if self.layout.owner_unchecked(self.targets[e]) != self.part_id {
                self.n_interedges -= 1;
            }
        }
    }

    /// Physically removes deleted edges.
    pub fn compact(&mut self) {
        if self.n_live == self.targets.len() {
            return;
        }
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut targets = Vec::with_capacity(self.n_live);
        let mut weights = Vec::with_capacity(self.n_live);
        offsets.push(0);
        for i in 0..self.n_owned() {
            for e in self.slots(i) {
                if self.live[e] {
                    targets.push(self.targets[e]);
                    weights.push(self.weights[e]);
                }
            }
            offsets.push(targets.len());
        }
        self.live = vec![true; targets.len()];
        self.offsets = offsets;
        self.targets = targets;
        self.weights = weights;
    }
}

/// Splits `g` into `p` block partitions. Each edge goes to the owner of its
/// source vertex.
pub fn partition_graph(g: &Graph, p: usize) -> Result<Vec<Partition>, GraphError> {
    let layout = PartitionLayout::new(g.n_vertices(), p)?;
    Ok(sweep::map((0..p).collect(), |rank| Partition::extract(g, layout, rank)))
}
