//! Sequential reference solvers. Every distributed run is checked against
//! these.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Dist, Graph, GraphError, VertexId, INF};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub dist: Vec<Dist>,
    /// Non-stale pops (Dijkstra) or relaxation rounds (Bellman-Ford).
    pub pops: u64,
    /// Edge examinations.
    pub relaxations: u64,
    /// Settled vertices in pop order; empty for Bellman-Ford.
    pub pop_order: Vec<VertexId>,
}

/// Binary-heap Dijkstra with lazy deletion and `(dist, id)` tie-breaking.
pub fn dijkstra_seq(g: &Graph, s: VertexId) -> Result<OracleResult, GraphError> {
    g.check_vertex(s)?;
    let mut dist = vec![INF; g.n_vertices()];
    let mut heap = BinaryHeap::new();
    let mut pop_order = Vec::new();
    let mut relaxations = 0;
    dist[s as usize] = 0;
    heap.push(Reverse((0, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        pop_order.push(u);
        for (v, w) in g.neighbors(u) {
            relaxations += 1;
            let nd = d.saturating_add(w);
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    Ok(OracleResult { dist, pops: pop_order.len() as u64, relaxations, pop_order })
}

/// Round-based Bellman-Ford with early exit. Independent of the heap path.
pub fn bellman_ford_seq(g: &Graph, s: VertexId) -> Result<OracleResult, GraphError> {
    g.check_vertex(s)?;
    let mut dist = vec![INF; g.n_vertices()];
    dist[s as usize] = 0;
    let mut rounds = 0;
    let mut relaxations = 0;
    for _ in 0..g.n_vertices() {
        rounds += 1;
        let mut changed = false;
        for (u, v, w) in g.edges() {
            relaxations += 1;
            let du = dist[u as usize];
            if du != INF && du + w < dist[v as usize] {
                dist[v as usize] = du + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(OracleResult { dist, pops: rounds, relaxations, pop_order: Vec::new() })
}

/// `dist(v) <= dist(u) + w` for every edge with finite `dist(u)`.
pub fn satisfies_triangle_inequality(g: &Graph, dist: &[Dist]) -> bool {
    g.edges().all(|(u, v, w)| {
        let du = dist[u as usize];
        du == INF || dist[v as usize] <= du + w
    })
}
