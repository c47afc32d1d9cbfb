use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spasync::genbench::{
    generate_rmat, resolve_source, run_cell, run_experiment, summarize, write_reports, write_summary, BenchPlan,
    CellSpec, GenSpec, RunMode,
};
use spasync::graph::{load_graph, partition_graph, save_edgelist};
use spasync::oracle::dijkstra_seq;
use spasync::run::write_distances;
use spasync::trishla::prune_full;
use spasync::{run_sssp, Graph, TermMode, VertexId, INF};

#[derive(Parser)]
#[command(name = "spasync", version, about = "Asynchronous distributed SSSP with triangle pruning")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an RMAT edge list.
    Gen {
        #[arg(long)]
        scale: u32,
        #[arg(long)]
        edge_factor: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run one SSSP and print its report row.
    Run(RunArgs),
    /// Run, diff against the sequential oracle, exit nonzero on mismatch.
    Verify(RunArgs),
    /// Execute an experiment plan.
    Bench {
        #[arg(long)]
        plan: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Per-cell means and speedups; printed to stdout when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Edges before and after pruning, per partition.
    PruneStats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        parts: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sim,
    Threads,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TermArg {
    TokenRing,
    CountHeuristic,
    CountHeuristicLiteral,
}

impl From<TermArg> for TermMode {
    fn from(t: TermArg) -> Self {
        match t {
            TermArg::TokenRing => TermMode::TokenRing,
            TermArg::CountHeuristic => TermMode::CountHeuristic,
            TermArg::CountHeuristicLiteral => TermMode::CountHeuristicLiteral,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Edge list, or DIMACS when the extension is `.gr`.
    #[arg(long)]
    graph: PathBuf,
    /// Defaults to the highest out-degree vertex.
    #[arg(long)]
    source: Option<VertexId>,
    #[arg(long, default_value_t = 1)]
    parts: usize,
    #[arg(long, value_enum, default_value = "token_ring")]
    term: TermArg,
    #[arg(long, value_enum, default_value = "sim")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    max_delay: u64,
    #[arg(long, default_value_t = 1_000_000)]
    tick_cap: u64,
    #[arg(long)]
    no_prune: bool,
    /// Write "v dist" lines here.
    #[arg(long)]
    dist_out: Option<PathBuf>,
}

impl RunArgs {
    fn cell(&self) -> CellSpec {
        CellSpec {
            p: self.parts,
            term_mode: self.term.into(),
            trial: 0,
            seed: self.seed,
            mode: match self.mode {
                ModeArg::Sim => RunMode::Sim,
                ModeArg::Threads => RunMode::Threads,
            },
            max_delay: self.max_delay,
            tick_cap: self.tick_cap,
            prune: !self.no_prune,
        }
    }

    fn load(&self) -> Result<(String, Graph, VertexId)> {
        let g = load_graph(&self.graph).with_context(|| format!("loading {}", self.graph.display()))?;
        let source = resolve_source(&g, self.source)?;
        Ok((graph_id(&self.graph), g, source))
    }
}

fn graph_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn save_dist(path: &Path, dist: &[u64]) -> Result<()> {
    let mut w = create(path)?;
    write_distances(dist, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let (id, g, source) = args.load()?;
    let oracle = dijkstra_seq(&g, source)?.dist;
    let cell = args.cell();
    let report = run_cell(&g, &id, source, &oracle, &cell)?;
    if let Some(path) = &args.dist_out {
        let r = run_sssp(&g, source, &cell.run_config())?;
        save_dist(path, &r.dist)?;
    }
    write_reports(&[report], io::stdout().lock())?;
    Ok(())
}

fn cmd_verify(args: &RunArgs) -> Result<bool> {
    let (_, g, source) = args.load()?;
    let oracle = dijkstra_seq(&g, source)?.dist;
    let r = run_sssp(&g, source, &args.cell().run_config())?;
    if let Some(path) = &args.dist_out {
        save_dist(path, &r.dist)?;
    }
    let bad: Vec<usize> = (0..oracle.len()).filter(|&v| r.dist[v] != oracle[v]).collect();
    let show = |d: u64| if d == INF { "INF".to_string() } else { d.to_string() };
    let mut out = io::stdout().lock();
    writeln!(out, "verdict {}", r.verdict)?;
    for &v in bad.iter().take(20) {
        writeln!(out, "mismatch v={v} got={} want={}", show(r.dist[v]), show(oracle[v]))?;
    }
    if bad.is_empty() {
        writeln!(out, "ok: {} vertices match", oracle.len())?;
    } else {
        writeln!(out, "FAIL: {} of {} vertices differ", bad.len(), oracle.len())?;
    }
    Ok(bad.is_empty())
}

fn cmd_bench(plan: &Path, output: &Path, summary: Option<&Path>) -> Result<()> {
    let plan = BenchPlan::load(plan).with_context(|| format!("reading plan {}", plan.display()))?;
    let reports = run_experiment(&plan)?;
    let mut w = create(output)?;
    write_reports(&reports, &mut w)?;
    w.flush()?;
    let rows = summarize(&reports);
    match summary {
        Some(path) => {
            let mut w = create(path)?;
            write_summary(&rows, &mut w)?;
            w.flush()?;
        }
        None => write_summary(&rows, io::stdout().lock())?,
    }
    let bad = reports.iter().filter(|r| !r.oracle_match).count();
    eprintln!("{} runs written to {}, {bad} oracle mismatches", reports.len(), output.display());
    Ok(())
}

fn cmd_prune_stats(graph: &Path, parts: usize) -> Result<()> {
    let g = load_graph(graph).with_context(|| format!("loading {}", graph.display()))?;
    let mut out = io::stdout().lock();
    writeln!(out, "part,edges_before,edges_after,removed,removal_pct")?;
    let (mut before, mut after) = (0usize, 0usize);
    for part in partition_graph(&g, parts)? {
        let id = part.part_id();
        let b = part.n_edges();
        let (pruned, removed) = prune_full(part);
        let a = pruned.n_edges();
        before += b;
        after += a;
        writeln!(out, "{id},{b},{a},{removed},{:.2}", pct(removed, b))?;
    }
    writeln!(out, "total,{before},{after},{},{:.2}", before - after, pct(before - after, before))?;
    Ok(())
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen { scale, edge_factor, seed, output } => (|| {
            let g = generate_rmat(&GenSpec::new(scale, edge_factor, seed))?;
            save_edgelist(&g, &output)?;
            eprintln!("wrote {} vertices, {} edges to {}", g.n_vertices(), g.n_edges(), output.display());
            Ok(true)
        })(),
        Cmd::Run(args) => cmd_run(&args).map(|_| true),
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::Bench { plan, output, summary } => cmd_bench(&plan, &output, summary.as_deref()).map(|_| true),
        Cmd::PruneStats { graph, parts } => {
            if parts == 0 {
                Err(anyhow::anyhow!("--parts must be at least 1"))
            } else {
                cmd_prune_stats(&graph, parts).map(|_| true)
            }
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
