use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Graph, GraphError, VertexId, Weight};

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, GraphError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    if what == "weight" && tok.starts_with('-') {
        return Err(parse_err(line, format!("negative weight {tok}")));
    }
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

/// Parses the plain edge-list format: a header line `N M`, then `M` lines
/// `u v w` with 0-based ids. Lines starting with `#` are skipped.
pub fn parse_edgelist(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(VertexId, VertexId, Weight)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let mut toks = s.split_whitespace();
        match header {
            None => {
                let n = field(toks.next(), line, "vertex count")?;
                let m = field(toks.next(), line, "edge count")?;
                edges.reserve(m);
                header = Some((n, m));
            }
            Some((n, _)) => {
                let u: u64 = field(toks.next(), line, "source")?;
                let v: u64 = field(toks.next(), line, "target")?;
                let w: Weight = field(toks.next(), line, "weight")?;
                if u >= n as u64 || v >= n as u64 {
                    return Err(parse_err(line, format!("endpoint out of range ({u}, {v}) for n={n}")));
                }
                edges.push((u as VertexId, v as VertexId, w));
            }
        }
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(1, "missing header"))?;
    if edges.len() != m {
        return Err(GraphError::EdgeCountMismatch { declared: m, found: edges.len() });
    }
    Graph::build(&edges, n, true)
}

pub fn load_edgelist(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_edgelist(&std::fs::read_to_string(path)?)
}

/// Writes `g` as an edge list, one arc per line.
pub fn write_edgelist(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n_vertices(), g.n_edges())?;
    for (u, v, w) in g.edges() {
        writeln!(out, "{u} {v} {w}")?;
    }
    Ok(())
}

pub fn save_edgelist(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_edgelist(g, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Reads a DIMACS shortest-path `.gr` file (`p sp N M`, `a u v w` with
/// 1-based ids, `c` comments).
pub fn load_dimacs(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let text = std::fs::read_to_string(path)?;
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                let _kind: String = field(toks.next(), line, "problem kind")?;
                let n = field(toks.next(), line, "vertex count")?;
                let m = field(toks.next(), line, "edge count")?;
                header = Some((n, m));
            }
            Some("a") => {
                let (n, _) = header.ok_or_else(|| parse_err(line, "arc before problem line"))?;
                let u: u64 = field(toks.next(), line, "source")?;
                let v: u64 = field(toks.next(), line, "target")?;
                let w: Weight = field(toks.next(), line, "weight")?;
                if u == 0 || v == 0 || u > n as u64 || v > n as u64 {
                    return Err(parse_err(line, format!("endpoint out of range ({u}, {v}) for n={n}")));
                }
                edges.push(((u - 1) as VertexId, (v - 1) as VertexId, w));
            }
            Some(other) => return Err(parse_err(line, format!("unknown record {other:?}"))),
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(1, "missing problem line"))?;
    if edges.len() != m {
        return Err(GraphError::EdgeCountMismatch { declared: m, found: edges.len() });
    }
    Graph::build(&edges, n, true)
}

/// Picks the reader by extension: `.gr` is DIMACS, anything else the plain
/// edge list.
pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("gr") => load_dimacs(path),
        _ => load_edgelist(path),
    }
}
