use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{generate_rmat, BenchError, GenSpec, RunReport};
use crate::graph::{load_graph, Dist, Graph, VertexId};
use crate::oracle::dijkstra_seq;
use crate::run::{run_sssp, RunConfig, RunResult, Verdict};
use crate::sweep;
use crate::termination::TermMode;
use crate::transport::{DelayModel, TransportConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    Sim,
    Threads,
}

/// One graph in a plan: either a file or an RMAT spec.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanGraph {
    pub id: Option<String>,
    pub path: Option<PathBuf>,
    pub rmat: Option<GenSpec>,
    /// Fixed source vertex; the highest out-degree vertex when absent.
    pub source: Option<VertexId>,
    pub parts: Vec<usize>,
    #[serde(default = "default_terms")]
    pub term: Vec<TermMode>,
}

fn default_terms() -> Vec<TermMode> {
    vec![TermMode::TokenRing]
}

/// A TOML experiment plan:
///
/// ```toml
/// trials = 5
/// mode = "sim"
/// seed = 1
///
/// [[graph]]
/// id = "rmat14"
/// rmat = { scale = 14, edge_factor = 16, seed = 1 }
/// parts = [1, 2, 4, 8]
/// term = ["token_ring"]
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchPlan {
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_delay")]
    pub max_delay: u64,
    #[serde(default = "default_tick_cap")]
    pub tick_cap: u64,
    #[serde(default = "default_prune")]
    pub prune: bool,
    #[serde(rename = "graph")]
    pub graphs: Vec<PlanGraph>,
}

fn default_trials() -> u32 {
    5
}

fn default_max_delay() -> u64 {
    8
}

fn default_tick_cap() -> u64 {
    1_000_000
}

fn default_prune() -> bool {
    true
}

impl BenchPlan {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let plan: BenchPlan = toml::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    /// Reads a plan file; relative graph paths resolve against its
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let path = path.as_ref();
        let mut plan = Self::from_toml(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for g in &mut plan.graphs {
            if let Some(p) = &mut g.path {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(plan)
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.trials < 1 {
            return Err(BenchError::Spec("trials must be at least 1".into()));
        }
        if self.max_delay < 1 {
            return Err(BenchError::Spec("max_delay must be at least 1".into()));
        }
        for (i, g) in self.graphs.iter().enumerate() {
            if g.path.is_some() == g.rmat.is_some() {
                return Err(BenchError::Spec(format!("graph #{i}: give exactly one of `path` or `rmat`")));
            }
            if g.parts.is_empty() || g.term.is_empty() {
                return Err(BenchError::Spec(format!("graph #{i}: `parts` and `term` must be non-empty")));
            }
        }
        Ok(())
    }
}

impl PlanGraph {
    fn materialize(&self, index: usize) -> Result<(String, Graph), BenchError> {
        let (default_id, g) = match (&self.path, &self.rmat) {
            (Some(path), _) => {
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
                (stem.unwrap_or_else(|| format!("graph{index}")), load_graph(path)?)
            }
            (None, Some(spec)) => (
                format!("rmat_s{}_ef{}_seed{}", spec.scale, spec.edge_factor, spec.seed),
                generate_rmat(spec)?,
            ),
            (None, None) => return Err(BenchError::Spec(format!("graph #{index} has no source"))),
        };
        Ok((self.id.clone().unwrap_or(default_id), g))
    }
}

/// Fixed vertex if given, else the highest out-degree vertex.
pub fn resolve_source(g: &Graph, fixed: Option<VertexId>) -> Result<VertexId, BenchError> {
    let s = match fixed {
        Some(v) => v,
        None => g.max_out_degree_vertex().ok_or_else(|| BenchError::Spec("graph has no vertices".into()))?,
    };
    g.check_vertex(s)?;
    Ok(s)
}

/// Everything needed to run one trial of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSpec {
    pub p: usize,
    pub term_mode: TermMode,
    pub trial: u32,
    pub seed: u64,
    pub mode: RunMode,
    pub max_delay: u64,
    pub tick_cap: u64,
    pub prune: bool,
}

impl CellSpec {
    pub fn run_config(&self) -> RunConfig {
        let mut cfg = match self.mode {
            RunMode::Sim => RunConfig {
                transport: TransportConfig::simulated(self.p, self.seed)
                    .with_delay(DelayModel::uniform(1, self.max_delay)),
                ..RunConfig::sim(self.p, self.term_mode, self.seed)
            },
            RunMode::Threads => RunConfig::threads(self.p, self.term_mode),
        };
        cfg.transport.tick_cap = self.tick_cap;
        cfg.engine.prune = self.prune;
        cfg
    }
}

/// Runs one trial and checks it against `oracle`.
pub fn run_cell(
    g: &Graph,
    graph_id: &str,
    source: VertexId,
    oracle: &[Dist],
    cell: &CellSpec,
) -> Result<RunReport, BenchError> {
    let r = run_sssp(g, source, &cell.run_config())?;
    grade(g, graph_id, oracle, cell, &r)
}

/// Turns a finished run into a report row, comparing every distance with
/// `oracle`. A clean verdict with wrong distances is an error, never a row.
pub fn grade(
    g: &Graph,
    graph_id: &str,
    oracle: &[Dist],
    cell: &CellSpec,
    r: &RunResult,
) -> Result<RunReport, BenchError> {
    let oracle_match = r.dist == oracle;
    if r.verdict == Verdict::Clean && !oracle_match {
        return Err(BenchError::CleanMismatch {
            graph_id: graph_id.to_owned(),
            p: cell.p,
            term_mode: cell.term_mode,
            trial: cell.trial,
        });
    }
    Ok(RunReport {
        graph_id: graph_id.to_owned(),
        n: g.n_vertices(),
        m: g.n_edges(),
        p: cell.p,
        term_mode: cell.term_mode,
        trial: cell.trial,
        wall: r.wall.value(),
        updates: r.updates_sent,
        relax: r.relax_attempts,
        mteps: r.mteps(),
        verdict: r.verdict,
        oracle_match,
        pruned_edges: r.pruned_edges,
    })
}

/// Runs every `(graph, p, mode, trial)` cell. Simulated cells are
/// independent and run as a parallel batch; threaded cells run one at a
/// time so their wall clocks do not interfere.
pub fn run_experiment(plan: &BenchPlan) -> Result<Vec<RunReport>, BenchError> {
    plan.validate()?;
    let mut reports = Vec::new();
    for (i, pg) in plan.graphs.iter().enumerate() {
        let (graph_id, g) = pg.materialize(i)?;
        let source = resolve_source(&g, pg.source)?;
        let oracle = dijkstra_seq(&g, source)?.dist;
        let mut cells = Vec::new();
        for &p in &pg.parts {
            for &term_mode in &pg.term {
                for trial in 0..plan.trials {
                    cells.push(CellSpec {
                        p,
                        term_mode,
                        trial,
                        seed: plan.seed.wrapping_add(trial as u64),
                        mode: plan.mode,
                        max_delay: plan.max_delay,
                        tick_cap: plan.tick_cap,
                        prune: plan.prune,
                    });
                }
            }
        }
        let run = |cell: CellSpec| run_cell(&g, &graph_id, source, &oracle, &cell);
        let rows = match plan.mode {
            RunMode::Sim => sweep::map(cells, run),
            RunMode::Threads => sweep::map_seq(cells, run),
        };
        for row in rows {
            reports.push(row?);
        }
    }
    Ok(reports)
}
