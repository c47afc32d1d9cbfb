//! Asynchronous distributed single-source shortest paths.
//!
//! Every logical process owns a contiguous block of vertices, runs Dijkstra
//! over its own subgraph and ships tentative distances for ghost vertices to
//! their owners; across processes this behaves like Bellman-Ford. Processes
//! that have not yet been reached spend their idle time pruning edges that a
//! local triangle proves useless. Quiescence is detected either by a
//! white/black/red token ring or by an idle-poll timeout heuristic.
//!
//! Processes talk through [`transport`], which has a deterministic
//! discrete-event simulator (the reference mode for all correctness checks)
//! and a thread-per-process mode. [`oracle`] provides the sequential ground
//! truth and [`genbench`] the RMAT generator and experiment harness.

pub mod engine;
pub mod genbench;
pub mod graph;
pub mod oracle;
pub mod run;
pub mod sweep;
pub mod termination;
pub mod transport;
pub mod trishla;

pub use graph::{Dist, Graph, GraphError, Partition, PartitionLayout, VertexId, Weight, INF};
pub use run::{run_sssp, RunConfig, RunResult, Verdict};
pub use termination::TermMode;
