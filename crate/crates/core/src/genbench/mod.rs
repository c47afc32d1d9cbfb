//! RMAT generation, the experiment harness and its CSV reports.

mod experiment;
mod report;
mod rmat;

pub use experiment::{
    grade, resolve_source, run_cell, run_experiment, BenchPlan, CellSpec, PlanGraph, RunMode,
};
pub use report::{
    read_reports, summarize, write_reports, write_summary, RunReport, SummaryRow, REPORT_HEADER,
    SUMMARY_HEADER,
};
pub use rmat::{generate_rmat, GenSpec, GRAPH500_PROBS};

use thiserror::Error;

use crate::graph::GraphError;
use crate::run::RunError;
use crate::termination::TermMode;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("plan: {0}")]
    Plan(#[from] toml::de::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("graph {graph_id}, p={p}, {term_mode}, trial {trial}: clean termination but distances differ from the oracle")]
    CleanMismatch { graph_id: String, p: usize, term_mode: TermMode, trial: u32 },
}
