//! Input formats, analysis reports and CSV output.
//!
//! Vertex ids are 1-based in every file and 0-based in memory. Reals are written
//! with 17 significant digits in text and CSV, and as shortest round-trip decimals in JSON.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::chain::{MarkovChain, Origin, WeightedGraph};
use crate::error::{Error, Result};
use crate::families::ScanRow;
use crate::isoperimetry::CutResult;
use crate::spectral::{SpectralCertificate, SpectralKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    EdgeTsv,
    DenseMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    Text,
}

/// A parsed input file: a graph, or a raw transition matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphInput {
    Graph(WeightedGraph),
    Transition(DMatrix<f64>),
}

impl GraphInput {
    pub fn into_chain(self) -> Result<MarkovChain> {
        match self {
            GraphInput::Graph(g) if g.is_directed() => MarkovChain::from_directed(&g),
            GraphInput::Graph(g) => MarkovChain::from_undirected(&g),
            GraphInput::Transition(p) => MarkovChain::from_transition(p),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_real(token: &str, line: usize) -> Result<f64> {
    let x: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{token}`")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{token}`")));
    }
    Ok(x)
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    let id: usize = token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid vertex id `{token}`")))?;
    id.checked_sub(1)
        .ok_or_else(|| parse_err(line, "vertex ids are 1-based"))
}

/// Header `directed` or `undirected`, optionally followed by the vertex count,
/// then lines `u<TAB>v<TAB>w`. Without a count, `n` is the largest id seen.
fn parse_edge_tsv(text: &str) -> Result<GraphInput> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::InconsistentHeader("missing `directed`/`undirected` header".into()))?;
    let mut tokens = header.split_whitespace();
    let directed = match tokens.next() {
        Some("directed") => true,
        Some("undirected") => false,
        other => {
            return Err(Error::InconsistentHeader(format!(
                "line {header_line}: expected `directed` or `undirected`, found `{}`",
                other.unwrap_or("")
            )))
        }
    };
    let declared_n = tokens
        .next()
        .map(|t| {
            t.parse::<usize>().map_err(|_| {
                Error::InconsistentHeader(format!("line {header_line}: invalid vertex count `{t}`"))
            })
        })
        .transpose()?;
    if let Some(extra) = tokens.next() {
        return Err(Error::InconsistentHeader(format!(
            "line {header_line}: unexpected token `{extra}`"
        )));
    }

    let mut edges = Vec::new();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, found {}", fields.len())));
        }
        let u = parse_id(fields[0], line)?;
        let v = parse_id(fields[1], line)?;
        let w = parse_real(fields[2], line)?;
        if w < 0.0 {
            return Err(Error::NegativeWeight { line, weight: w });
        }
        edges.push((line, u, v, w));
    }
    let max_id = edges.iter().map(|&(_, u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared_n {
        Some(n) if max_id > n => {
            return Err(Error::InconsistentHeader(format!(
                "vertex id {max_id} exceeds the declared count {n}"
            )))
        }
        Some(n) => n,
        None => max_id,
    };
    let base = if directed {
        WeightedGraph::directed(n)
    } else {
        WeightedGraph::undirected(n)
    };
    let mut g = base.with_self_loops();
    for (line, u, v, w) in edges {
        g.add_edge(u, v, w).map_err(|e| match e {
            Error::InvalidGraph(m) => parse_err(line, m),
            other => other,
        })?;
    }
    Ok(GraphInput::Graph(g))
}

/// Header `matrix-kind transition|weight`, then `n` rows of `n` reals. A symmetric
/// weight matrix becomes an undirected graph, any other a directed one.
fn parse_dense_matrix(text: &str) -> Result<GraphInput> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::InconsistentHeader("missing `matrix-kind` header".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let transition = match tokens.as_slice() {
        ["matrix-kind", "transition"] => true,
        ["matrix-kind", "weight"] => false,
        _ => {
            return Err(Error::InconsistentHeader(format!(
                "line {header_line}: expected `matrix-kind transition` or `matrix-kind weight`"
            )))
        }
    };
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (line, l) in lines {
        let row = l
            .split_whitespace()
            .map(|t| parse_real(t, line))
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, row));
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::InconsistentHeader("matrix has no rows".into()));
    }
    for (line, row) in &rows {
        if row.len() != n {
            return Err(parse_err(
                *line,
                format!("expected {n} entries in a {n}-row matrix, found {}", row.len()),
            ));
        }
        if let Some(&w) = row.iter().find(|&&w| w < 0.0) {
            return Err(Error::NegativeWeight { line: *line, weight: w });
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i].1[j]);
    if transition {
        return Ok(GraphInput::Transition(m));
    }
    let symmetric = (0..n).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]));
    let mut g = if symmetric {
        WeightedGraph::undirected(n)
    } else {
        WeightedGraph::directed(n)
    }
    .with_self_loops();
    for i in 0..n {
        let cols = if symmetric { i..n } else { 0..n };
        for j in cols {
            if m[(i, j)] > 0.0 {
                g.add_edge(i, j, m[(i, j)])?;
            }
        }
    }
    Ok(GraphInput::Graph(g))
}

pub fn parse_graph_str(text: &str, format: InputFormat) -> Result<GraphInput> {
    match format {
        InputFormat::EdgeTsv => parse_edge_tsv(text),
        InputFormat::DenseMatrix => parse_dense_matrix(text),
    }
}

pub fn parse_graph(path: &Path, format: InputFormat) -> Result<GraphInput> {
    parse_graph_str(&fs::read_to_string(path)?, format)
}

pub fn load_chain(path: &Path, format: InputFormat) -> Result<MarkovChain> {
    parse_graph(path, format)?.into_chain()
}

/// Edge-tsv text with the vertex count in the header.
pub fn graph_to_tsv(g: &WeightedGraph) -> String {
    let kind = if g.is_directed() { "directed" } else { "undirected" };
    let mut out = format!("{kind}\t{}\n", g.n());
    for &(u, v, w) in g.edges() {
        writeln!(out, "{}\t{}\t{w:.16e}", u + 1, v + 1).unwrap();
    }
    out
}

pub fn write_graph_tsv(g: &WeightedGraph, path: &Path) -> Result<()> {
    fs::write(path, graph_to_tsv(g))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub n: usize,
    pub origin: Origin,
    pub reversible: bool,
    pub lazy: bool,
    pub stationary_residual: f64,
}

impl ChainSummary {
    pub fn of(c: &MarkovChain) -> Self {
        Self {
            n: c.n(),
            origin: c.origin(),
            reversible: c.is_reversible_default(),
            lazy: c.is_lazy(),
            stationary_residual: c.stationary_residual(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub kind: SpectralKind,
    pub lambda2: f64,
    pub residual: f64,
}

impl From<&SpectralCertificate> for SpectralSummary {
    fn from(c: &SpectralCertificate) -> Self {
        Self {
            kind: c.kind,
            lambda2: c.lambda2,
            residual: c.residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(source: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            source: source.into(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub chain: ChainSummary,
    pub spectral: Vec<SpectralSummary>,
    pub cuts: Vec<CutResult>,
    pub bounds: Vec<BoundReport>,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn all_hold(&self) -> bool {
        self.bounds.iter().all(|b| b.holds)
    }
}

/// Output of the sweep subcommand: every level set, the best one, and its guarantee.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub p: f64,
    pub spectral: SpectralSummary,
    pub levels: Vec<CutResult>,
    pub best: CutResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guarantee: Option<BoundReport>,
    pub provenance: Provenance,
}

fn e17(x: f64) -> String {
    format!("{x:.16e}")
}

fn subset_ids(subset: &[usize]) -> String {
    let ids: Vec<String> = subset.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        writeln!(out, "  {}", cells.join("  ").trim_end()).unwrap();
    }
    out
}

fn bound_rows(bounds: &[BoundReport]) -> Vec<Vec<String>> {
    let mut rows = vec![["name", "lhs", "rhs", "slack", "verdict"].map(String::from).to_vec()];
    rows.extend(bounds.iter().map(|b| {
        vec![
            b.name.clone(),
            e17(b.lhs),
            e17(b.rhs),
            e17(b.slack),
            if b.holds { "holds" } else { "FAILS" }.to_string(),
        ]
    }));
    rows
}

fn cut_rows(cuts: &[CutResult]) -> Vec<Vec<String>> {
    let mut rows = vec![["p", "method", "phi", "pi_mass", "subset"].map(String::from).to_vec()];
    rows.extend(cuts.iter().map(|c| {
        vec![
            c.p.to_string(),
            serde_json::to_value(c.method).unwrap().as_str().unwrap().to_string(),
            e17(c.phi),
            e17(c.pi_mass),
            subset_ids(&c.subset),
        ]
    }));
    rows
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let origin = serde_json::to_value(r.chain.origin).unwrap();
    writeln!(out, "source: {}", r.provenance.source).unwrap();
    if let Some(seed) = r.provenance.seed {
        writeln!(out, "seed: {seed}").unwrap();
    }
    writeln!(out, "version: {}", r.provenance.tool_version).unwrap();
    writeln!(
        out,
        "chain: n = {}, origin = {}, reversible = {}, lazy = {}, stationary residual = {}",
        r.chain.n,
        origin.as_str().unwrap(),
        r.chain.reversible,
        r.chain.lazy,
        e17(r.chain.stationary_residual)
    )
    .unwrap();
    out.push_str("\nspectral\n");
    let mut spectral = vec![["kind", "lambda2", "residual"].map(String::from).to_vec()];
    spectral.extend(r.spectral.iter().map(|s| {
        vec![
            serde_json::to_value(s.kind).unwrap().as_str().unwrap().to_string(),
            e17(s.lambda2),
            e17(s.residual),
        ]
    }));
    out.push_str(&table(&spectral));
    out.push_str("\ncuts\n");
    out.push_str(&table(&cut_rows(&r.cuts)));
    out.push_str("\nbounds\n");
    out.push_str(&table(&bound_rows(&r.bounds)));
    out
}

/// Inequality table `name  lhs  rhs  slack  verdict`.
pub fn render_bounds(bounds: &[BoundReport]) -> String {
    table(&bound_rows(bounds))
}

pub fn render_report(r: &AnalysisReport, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r)?;
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(r),
    })
}

/// Write the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(r: &AnalysisReport, path: Option<&Path>, format: ReportFormat) -> Result<()> {
    write_output(path, &render_report(r, format)?)
}

pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents)?,
        None => std::io::stdout().lock().write_all(contents.as_bytes())?,
    }
    Ok(())
}

pub const SCAN_CSV_HEADER: &str = "n,lambda2,phi_half_arc,rho,lambda2_scaled,phi_scaled";

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = format!("{SCAN_CSV_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            e17(r.lambda2),
            e17(r.phi_half_arc),
            e17(r.rho),
            e17(r.lambda2_scaled),
            e17(r.phi_scaled)
        )
        .unwrap();
    }
    out
}

pub fn write_scan_csv(rows: &[ScanRow], path: Option<&Path>) -> Result<()> {
    write_output(path, &scan_csv(rows))
}
