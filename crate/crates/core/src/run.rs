//! End-to-end driver: partition, spawn one engine per rank, run under the
//! chosen transport, gather distances.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::{EngineConfig, EngineError, ProcState};
use crate::graph::{partition_graph, Dist, Graph, GraphError, VertexId, INF};
use crate::termination::TermMode;
use crate::transport::{run_simulation, run_threaded, Mode, SimOutcome, TransportConfig, TransportError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Every rank stopped on the ring protocol's red token.
    Clean,
    /// Every rank stopped, at least one on a heuristic trigger.
    Heuristic,
    /// The tick (or wall-clock) cap expired first.
    TickCap,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Clean => "clean",
            Verdict::Heuristic => "heuristic",
            Verdict::TickCap => "tick_cap",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [Verdict::Clean, Verdict::Heuristic, Verdict::TickCap]
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown verdict {s:?}"))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub engine: EngineConfig,
    pub transport: TransportConfig,
}

impl RunConfig {
    pub fn sim(n_parts: usize, term_mode: TermMode, seed: u64) -> Self {
        RunConfig {
            engine: EngineConfig { term_mode, ..EngineConfig::default() },
            transport: TransportConfig::simulated(n_parts, seed),
        }
    }

    pub fn threads(n_parts: usize, term_mode: TermMode) -> Self {
        RunConfig {
            engine: EngineConfig { term_mode, ..EngineConfig::default() },
            transport: TransportConfig::threaded(n_parts),
        }
    }
}

/// Elapsed time: scheduler ticks in simulation, seconds with threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wall {
    Ticks(u64),
    Seconds(f64),
}

impl Wall {
    pub fn value(self) -> f64 {
        match self {
            Wall::Ticks(t) => t as f64,
            Wall::Seconds(s) => s,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub dist: Vec<Dist>,
    pub verdict: Verdict,
    pub wall: Wall,
    pub updates_sent: u64,
    pub relax_attempts: u64,
    pub pops: u64,
    pub pruned_edges: usize,
    /// Present for simulated runs.
    pub sim: Option<SimOutcome>,
    /// Per-rank settle order, when the engine traces pops.
    pub pop_logs: Vec<Vec<VertexId>>,
}

impl RunResult {
    /// Relaxation attempts per second in millions; threaded runs only.
    pub fn mteps(&self) -> Option<f64> {
        match self.wall {
            Wall::Seconds(s) if s > 0.0 => Some(self.relax_attempts as f64 / s / 1e6),
            _ => None,
        }
    }
}

fn gather(n: usize, procs: &[ProcState]) -> Vec<Dist> {
    let mut dist = vec![INF; n];
    for p in procs {
        for (v, d) in p.dist().iter() {
            dist[v as usize] = d;
        }
    }
    dist
}

fn verdict_of(all_terminated: bool, all_clean: bool) -> Verdict {
    match (all_terminated, all_clean) {
        (false, _) => Verdict::TickCap,
        (true, true) => Verdict::Clean,
        (true, false) => Verdict::Heuristic,
    }
}

/// Solves SSSP from `source` over `cfg.transport.n_parts` logical
/// processes.
pub fn run_sssp(g: &Graph, source: VertexId, cfg: &RunConfig) -> Result<RunResult, RunError> {
    g.check_vertex(source)?;
    let parts = partition_graph(g, cfg.transport.n_parts)?;
    let procs: Vec<ProcState> =
        parts.into_iter().map(|p| ProcState::init(p, source, cfg.engine.clone())).collect();

    let (procs, verdict, wall, sim) = match cfg.transport.mode {
        Mode::Simulated => {
            let (out, procs) = run_simulation(procs, &cfg.transport)?;
            let verdict = verdict_of(out.all_terminated, out.all_clean);
            (procs, verdict, Wall::Ticks(out.ticks), Some(out))
        }
        Mode::Threaded => {
            let (out, procs) = run_threaded(procs, &cfg.transport)?;
            let verdict = verdict_of(out.all_terminated, out.all_clean);
            (procs, verdict, Wall::Seconds(out.wall_seconds), None)
        }
    };

    Ok(RunResult {
        dist: gather(g.n_vertices(), &procs),
        verdict,
        wall,
        updates_sent: procs.iter().map(ProcState::sent_count).sum(),
        relax_attempts: procs.iter().map(ProcState::relax_attempts).sum(),
        pops: procs.iter().map(ProcState::pops).sum(),
        pruned_edges: procs.iter().map(ProcState::pruned_edges).sum(),
        sim,
        pop_logs: procs.iter().map(|p| p.pop_log().to_vec()).collect(),
    })
}

/// Writes `v dist` lines, `INF` for unreached vertices.
pub fn write_distances(dist: &[Dist], mut out: impl std::io::Write) -> std::io::Result<()> {
    for (v, &d) in dist.iter().enumerate() {
        if d == INF {
            writeln!(out, "{v} INF")?;
        } else {
            writeln!(out, "{v} {d}")?;
        }
    }
    Ok(())
}
