use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::run::Verdict;
use crate::termination::TermMode;

/// CSV header for run reports.
pub const REPORT_HEADER: &str =
    "graph_id,n,m,p,term_mode,trial,wall,updates,relax,mteps,verdict,oracle_match,pruned_edges";

/// One measured run. `wall` is ticks for simulated runs and seconds for
/// threaded ones; `mteps` is only filled for threaded runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub graph_id: String,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub term_mode: TermMode,
    pub trial: u32,
    pub wall: f64,
    pub updates: u64,
    pub relax: u64,
    pub mteps: Option<f64>,
    pub verdict: Verdict,
    pub oracle_match: bool,
    pub pruned_edges: usize,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn write_reports(reports: &[RunReport], out: impl Write) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(REPORT_HEADER.split(','))?;
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_reports(input: impl Read) -> Result<Vec<RunReport>, BenchError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != REPORT_HEADER {
        return Err(BenchError::Spec(format!("unexpected report header {:?}", header.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(BenchError::from)).collect()
}

/// Aggregated view of all trials for one `(graph, mode, p)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub graph_id: String,
    pub term_mode: TermMode,
    pub p: usize,
    pub trials: usize,
    pub wall_mean: f64,
    /// `wall_mean(p = 1) / wall_mean(p)` for the same graph and mode.
    pub speedup: Option<f64>,
    pub mteps_mean: Option<f64>,
    pub updates_mean: f64,
    pub relax_mean: f64,
    pub oracle_match_all: bool,
}

pub const SUMMARY_HEADER: &str =
    "graph_id,term_mode,p,trials,wall_mean,speedup,mteps_mean,updates_mean,relax_mean,oracle_match_all";

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

/// Averages trials per cell, in order of first appearance, and attaches
/// speedup against the single-process cell.
pub fn summarize(reports: &[RunReport]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, TermMode, usize)> = Vec::new();
    for r in reports {
        let k = (r.graph_id.as_str(), r.term_mode, r.p);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut rows: Vec<SummaryRow> = keys
        .iter()
        .map(|&(g, mode, p)| {
            let cell: Vec<&RunReport> =
                reports.iter().filter(|r| r.graph_id == g && r.term_mode == mode && r.p == p).collect();
            let mteps: Vec<f64> = cell.iter().filter_map(|r| r.mteps).collect();
            SummaryRow {
                graph_id: g.to_owned(),
                term_mode: mode,
                p,
                trials: cell.len(),
                wall_mean: mean(cell.iter().map(|r| r.wall)),
                speedup: None,
                mteps_mean: (!mteps.is_empty()).then(|| mean(mteps.into_iter())),
                updates_mean: mean(cell.iter().map(|r| r.updates as f64)),
                relax_mean: mean(cell.iter().map(|r| r.relax as f64)),
                oracle_match_all: cell.iter().all(|r| r.oracle_match),
            }
        })
        .collect();
    let baselines: Vec<(String, TermMode, f64)> = rows
        .iter()
        .filter(|r| r.p == 1)
        .map(|r| (r.graph_id.clone(), r.term_mode, r.wall_mean))
        .collect();
    for row in &mut rows {
        row.speedup = baselines
            .iter()
            .find(|(g, m, _)| *g == row.graph_id && *m == row.term_mode)
            .filter(|_| row.wall_mean > 0.0)
            .map(|&(_, _, base)| base / row.wall_mean);
    }
    rows
}

pub fn write_summary(rows: &[SummaryRow], out: impl Write) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SUMMARY_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
