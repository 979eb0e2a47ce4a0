//! Text and JSON formats: edge-list graphs, DIMACS CNF, layouts, path
//! decompositions, strategies, traces, and reduction labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadgets::{CubicMonotoneFormula, FormulaError, ReductionTree, Role};
use crate::graph::{Graph, GraphError};
use crate::propagation::{Strategy, Trace};
use crate::widths::{LinearLayout, PathDecomposition};

#[derive(Error, Debug)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: negative literal {literal} in a monotone formula")]
    NegativeLiteral { line: usize, literal: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> IoError {
    IoError::Malformed {
        line,
        message: message.into(),
    }
}

/// Lines of `text` with 1-based numbers, comments (`#`) and blanks skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Edge-list format: first line `n <vertexCount>`, then one `u v` per line.
pub fn parse_edge_list(text: &str) -> Result<Graph, IoError> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "missing `n <count>` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("n") {
        return Err(malformed(line, "header must start with `n`"));
    }
    let count: usize = parts
        .next()
        .ok_or_else(|| malformed(line, "header missing the vertex count"))?
        .parse()
        .map_err(|_| malformed(line, "vertex count is not a valid integer"))?;
    if parts.next().is_some() {
        return Err(malformed(line, "trailing tokens after the vertex count"));
    }
    let mut edges = Vec::new();
    for (line, text) in lines {
        let mut parts = text.split_whitespace();
        let u: usize = parts
            .next()
            .expect("non-empty line")
            .parse()
            .map_err(|_| malformed(line, "edge endpoint is not a valid integer"))?;
        let v: usize = parts
            .next()
            .ok_or_else(|| malformed(line, "edge line needs two endpoints"))?
            .parse()
            .map_err(|_| malformed(line, "edge endpoint is not a valid integer"))?;
        if parts.next().is_some() {
            return Err(malformed(line, "trailing tokens after the edge"));
        }
        edges.push((u, v));
    }
    Ok(Graph::new(count, &edges)?)
}

pub fn serialize_edge_list(graph: &Graph) -> String {
    let mut out = format!("n {}\n", graph.vertex_count());
    for &(u, v) in graph.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// DIMACS CNF restricted to positive literals; clauses may span lines and
/// are 0-terminated. Returns the validated cubic monotone formula.
pub fn parse_dimacs_cnf(text: &str) -> Result<CubicMonotoneFormula, IoError> {
    let mut variables: Option<usize> = None;
    let mut declared_clauses = 0usize;
    let mut clauses: Vec<[usize; 3]> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut current_line = 0usize;
    for (line, content) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if content.is_empty() || content.starts_with('c') {
            continue;
        }
        if content.starts_with('p') {
            if variables.is_some() {
                return Err(malformed(line, "duplicate `p cnf` header"));
            }
            let parts: Vec<&str> = content.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(malformed(line, "header must be `p cnf <vars> <clauses>`"));
            }
            variables = Some(
                parts[2]
                    .parse()
                    .map_err(|_| malformed(line, "variable count is not a valid integer"))?,
            );
            declared_clauses = parts[3]
                .parse()
                .map_err(|_| malformed(line, "clause count is not a valid integer"))?;
            continue;
        }
        if variables.is_none() {
            return Err(malformed(line, "clause before the `p cnf` header"));
        }
        for token in content.split_whitespace() {
            let literal: i64 = token
                .parse()
                .map_err(|_| malformed(line, "literal is not a valid integer"))?;
            if literal < 0 {
                return Err(IoError::NegativeLiteral { line, literal });
            }
            if literal == 0 {
                if current.len() != 3 {
                    return Err(malformed(
                        current_line.max(line),
                        format!("clause has {} literals instead of 3", current.len()),
                    ));
                }
                clauses.push([current[0], current[1], current[2]]);
                current.clear();
            } else {
                if current.is_empty() {
                    current_line = line;
                }
                current.push((literal - 1) as usize);
            }
        }
    }
    if !current.is_empty() {
        return Err(malformed(
            current_line,
            "unterminated clause at end of input",
        ));
    }
    let variables = variables.ok_or_else(|| malformed(1, "missing `p cnf` header"))?;
    if clauses.len() != declared_clauses {
        return Err(malformed(
            1,
            format!(
                "header declares {declared_clauses} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    Ok(CubicMonotoneFormula::new(variables, clauses)?)
}

/// Layout format: one line of space-separated vertex ids.
pub fn parse_layout(text: &str) -> Result<LinearLayout, IoError> {
    let mut order = Vec::new();
    for (line, content) in content_lines(text) {
        for token in content.split_whitespace() {
            let v: usize = token
                .parse()
                .map_err(|_| malformed(line, "vertex id is not a valid integer"))?;
            order.push(v);
        }
    }
    Ok(LinearLayout::new(order))
}

pub fn serialize_layout(layout: &LinearLayout) -> String {
    let ids: Vec<String> = layout.order().iter().map(usize::to_string).collect();
    format!("{}\n", ids.join(" "))
}

/// Decomposition format: one bag per line, space-separated ids.
pub fn parse_decomposition(text: &str) -> Result<PathDecomposition, IoError> {
    let mut bags = Vec::new();
    for (line, content) in content_lines(text) {
        let mut bag = std::collections::BTreeSet::new();
        for token in content.split_whitespace() {
            let v: usize = token
                .parse()
                .map_err(|_| malformed(line, "vertex id is not a valid integer"))?;
            bag.insert(v);
        }
        bags.push(bag);
    }
    Ok(PathDecomposition::new(bags))
}

pub fn serialize_decomposition(decomposition: &PathDecomposition) -> String {
    let mut out = String::new();
    for bag in &decomposition.bags {
        let ids: Vec<String> = bag.iter().map(usize::to_string).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_strategy(json: &str) -> Result<Strategy, IoError> {
    Ok(serde_json::from_str(json)?)
}

pub fn serialize_strategy(strategy: &Strategy) -> String {
    serde_json::to_string(strategy).expect("strategies serialize")
}

pub fn parse_trace(json: &str) -> Result<Trace, IoError> {
    Ok(serde_json::from_str(json)?)
}

pub fn serialize_trace(trace: &Trace) -> String {
    serde_json::to_string(trace).expect("traces serialize")
}

/// Companion labels of an emitted reduction graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReductionLabels {
    pub source: usize,
    pub k: usize,
    pub roles: BTreeMap<usize, Role>,
    pub clause_map: BTreeMap<usize, (usize, usize)>,
}

impl From<&ReductionTree> for ReductionLabels {
    fn from(tree: &ReductionTree) -> Self {
        ReductionLabels {
            source: tree.source,
            k: tree.k,
            roles: tree.roles.iter().copied().enumerate().collect(),
            clause_map: tree.clause_map.clone(),
        }
    }
}

pub fn serialize_labels(labels: &ReductionLabels) -> String {
    serde_json::to_string(labels).expect("labels serialize")
}

pub fn parse_labels(json: &str) -> Result<ReductionLabels, IoError> {
    Ok(serde_json::from_str(json)?)
}

/// Assignment format: one line of space-separated 0/1 values.
pub fn parse_assignment(text: &str) -> Result<Vec<bool>, IoError> {
    let mut values = Vec::new();
    for (line, content) in content_lines(text) {
        for token in content.split_whitespace() {
            match token {
                "0" => values.push(false),
                "1" => values.push(true),
                _ => return Err(malformed(line, "assignment values must be 0 or 1")),
            }
        }
    }
    Ok(values)
}

pub fn serialize_assignment(assignment: &[bool]) -> String {
    let bits: Vec<&str> = assignment
        .iter()
        .map(|&b| if b { "1" } else { "0" })
        .collect();
    format!("{}\n", bits.join(" "))
}
