//! Plain-text graph files.
//!
//! ```text
//! # comment
//! node spend
//! node top10
//! spend -> top10
//! top10 -- tstsc
//! ```
//!
//! Node lines fix the vertex order. Edge lines may only mention declared
//! nodes.

use std::fmt::Write as _;

use ampcg_core::MixedGraph;

use crate::error::{AppError, Result};

pub fn parse(text: &str) -> Result<MixedGraph> {
    let mut g = MixedGraph::new(Vec::<String>::new())?;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fail = |message: String| AppError::Format { line: line_no, message };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["node", label] => {
                g.add_vertex(*label).map_err(|e| fail(e.to_string()))?;
            }
            [from, "->", to] => g.add_directed(from, to).map_err(|e| fail(e.to_string()))?,
            [a, "--", b] => g.add_undirected(a, b).map_err(|e| fail(e.to_string()))?,
            _ => return Err(fail(format!("cannot parse `{line}`"))),
        }
    }
    Ok(g)
}

pub fn render(g: &MixedGraph) -> String {
    let mut out = String::new();
    for l in g.labels() {
        let _ = writeln!(out, "node {l}");
    }
    for (u, v) in g.directed_edges() {
        let _ = writeln!(out, "{} -> {}", g.label(u), g.label(v));
    }
    for (u, v) in g.undirected_edges() {
        let _ = writeln!(out, "{} -- {}", g.label(u), g.label(v));
    }
    out
}

pub fn read(path: &std::path::Path) -> Result<MixedGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse(&text)
}
