//! Triangle-based edge elimination.
//!
//! For an owned vertex `u` with out-edges `u -> a` and `u -> b`, if the local
//! subgraph holds `a -> b` and `w(u,b) > w(u,a) + w(a,b)`, the edge `u -> b`
//! can never lie on a shortest path and is deleted. Only triangles whose
//! middle vertex `a` is owned are visible, since ghost adjacency is not
//! stored locally. The scan is resumable so an idle process can interleave
//! it with polling.

use crate::graph::{Partition, VertexId};

/// Resume point of an incremental pruning pass.
///
/// The cursor is `(owned vertex, out-edge of u, out-edge of the middle
/// vertex)`, each an index into the local slot tables.
#[derive(Debug, Clone, Default)]
pub struct PruneState {
    vertex: usize,
    first: usize,
    second: usize,
    removed: usize,
    examined: u64,
    done: bool,
    /// `(target, slot)` over the out-edges of `vertex`, sorted by target.
    lookup: Vec<(VertexId, usize)>,
    lookup_for: Option<usize>,
}

impl PruneState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn removed(&self) -> usize {
        self.removed
    }

    /// Candidate triangles examined so far.
    pub fn examined(&self) -> u64 {
        self.examined
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn cursor(&self) -> (usize, usize, usize) {
        (self.vertex, self.first, self.second)
    }

    fn next_vertex(&mut self) {
        self.vertex += 1;
        self.first = 0;
        self.second = 0;
    }

    fn next_first(&mut self) {
        self.first += 1;
        self.second = 0;
    }
}

/// Examines at most `budget` candidate triangles, deleting dominated edges
/// as it goes. Returns the number of edges deleted by this call.
pub fn prune_step(part: &mut Partition, st: &mut PruneState, budget: usize) -> usize {
    let before = st.removed;
    let mut left = budget.max(1);
    while left > 0 && !st.done {
        if st.vertex >= part.n_owned() {
            st.done = true;
            break;
        }
        let u_slots = part.slots(st.vertex);
        if st.lookup_for != Some(st.vertex) {
            st.lookup.clear();
            st.lookup.extend(u_slots.clone().filter_map(|e| part.slot(e).map(|(v, _)| (v, e))));
            st.lookup.sort_unstable();
            st.lookup_for = Some(st.vertex);
        }
        if st.first >= u_slots.len() {
            st.next_vertex();
            continue;
        }
        let Some((mid, w_first)) = part.slot(u_slots.start + st.first) else {
            st.next_first();
            continue;
        };
        if !part.is_owned(mid) {
            st.next_first();
            continue;
        }
        let mid_slots = part.slots(part.local_index(mid));
        if st.second >= mid_slots.len() {
            st.next_first();
            continue;
        }
        let e_mid = mid_slots.start + st.second;
        st.second += 1;
        st.examined += 1;
        left -= 1;
        let Some((far, w_second)) = part.slot(e_mid) else {
            continue;
        };
        let bound = w_first.saturating_add(w_second);
        let lo = st.lookup.partition_point(|&(t, _)| t < far);
        for &(t, e) in &st.lookup[lo..] {
            if t != far {
                break;
            }
            if let Some((_, w_direct)) = part.slot(e) {
                if w_direct > bound {
                    part.delete(e);
                    st.removed += 1;
                }
            }
        }
    }
    st.removed - before
}

/// Runs one complete pass and compacts the result.
pub fn prune_full(mut part: Partition) -> (Partition, usize) {
    let mut st = PruneState::new();
    while !st.is_done() {
        prune_step(&mut part, &mut st, usize::MAX);
    }
    part.compact();
    (part, st.removed())
}
