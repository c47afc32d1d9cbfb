//! Weighted directed graphs in compressed adjacency form, plus 1D block
//! partitioning and edge-list I/O.

mod io;
mod partition;

pub use io::{load_dimacs, load_edgelist, load_graph, parse_edgelist, save_edgelist, write_edgelist};
pub use partition::{partition_graph, Partition, PartitionLayout};

use thiserror::Error;

/// Dense vertex index in `[0, n)`.
pub type VertexId = u32;
/// Non-negative integer edge weight.
pub type Weight = u64;
/// Path length. `INF` marks an unreached vertex.
pub type Dist = u64;

pub const INF: Dist = Dist::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside [0, {n})")]
    EndpointOutOfRange { u: u64, v: u64, n: usize },
    #[error("vertex {v} out of range for {n} vertices")]
    VertexOutOfRange { v: u64, n: usize },
    #[error("partition count {p} outside [1, {n}]")]
    PartsOutOfRange { p: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("header declares {declared} edges but file holds {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for GraphError {
    fn from(e: std::io::Error) -> Self {
        GraphError::Io(e.to_string())
    }
}

/// An immutable weighted graph. Out-edges of `u` live in
/// `targets[offsets[u]..offsets[u + 1]]`, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<Weight>,
    directed: bool,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops are dropped and parallel
    /// edges kept. An undirected input edge materializes both arcs.
    pub fn build(
        edges: &[(VertexId, VertexId, Weight)],
        n: usize,
        directed: bool,
    ) -> Result<Self, GraphError> {
        for &(u, v, _) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::EndpointOutOfRange { u: u.into(), v: v.into(), n });
            }
        }
        let arcs = edges.iter().filter(|(u, v, _)| u != v).flat_map(|&(u, v, w)| {
            let back = (!directed).then_some((v, u, w));
            std::iter::once((u, v, w)).chain(back)
        });
        let arcs: Vec<_> = arcs.collect();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; arcs.len()];
        let mut weights = vec![0; arcs.len()];
        for (u, v, w) in arcs {
            let slot = &mut fill[u as usize];
            targets[*slot] = v;
            weights[*slot] = w;
            *slot += 1;
        }
        Ok(Graph { offsets, targets, weights, directed })
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn out_degree(&self, u: VertexId) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Out-edges of `u` as `(target, weight)` pairs.
    pub fn neighbors(&self, u: VertexId) -> impl Iterator<Item = (VertexId, Weight)> + '_ {
        let r = self.offsets[u as usize]..self.offsets[u as usize + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    /// All arcs as `(source, target, weight)` in adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Weight)> + '_ {
        (0..self.n_vertices() as VertexId)
            .flat_map(move |u| self.neighbors(u).map(move |(v, w)| (u, v, w)))
    }

    /// Vertex with the most out-edges; the lowest id wins ties.
    pub fn max_out_degree_vertex(&self) -> Option<VertexId> {
        (0..self.n_vertices() as VertexId).max_by_key(|&u| (self.out_degree(u), std::cmp::Reverse(u)))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if (v as usize) < self.n_vertices() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v: v.into(), n: self.n_vertices() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_edge_materializes_both_arcs() {
        let g = Graph::build(&[(0, 1, 5)], 2, false).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![(1, 5)]);
        assert_eq!(g.neighbors(1).collect::<Vec<_>>(), vec![(0, 5)]);
    }

    #[test]
    fn self_loops_dropped() {
        let g = Graph::build(&[(0, 0, 3)], 1, true).unwrap();
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn parallel_edges_kept_in_order() {
        let g = Graph::build(&[(0, 1, 2), (0, 1, 7)], 2, true).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![(1, 2), (1, 7)]);
    }

    #[test]
    fn out_of_range_endpoint_rejected() {
        let err = Graph::build(&[(0, 2, 1)], 2, true).unwrap_err();
        assert!(matches!(err, GraphError::EndpointOutOfRange { v: 2, .. }));
    }

    #[test]
    fn adjacency_lengths_sum_to_edge_count() {
        let edges = [(2, 0, 1), (0, 1, 1), (2, 1, 4), (1, 2, 9), (0, 2, 3)];
        let g = Graph::build(&edges, 3, true).unwrap();
        let total: usize = (0..3).map(|u| g.out_degree(u)).sum();
        assert_eq!(total, g.n_edges());
        assert_eq!(g.neighbors(2).collect::<Vec<_>>(), vec![(0, 1), (1, 4)]);
        assert_eq!(g.max_out_degree_vertex(), Some(0));
    }
}
