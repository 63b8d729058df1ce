//! Plain-text graph files.
//!
//! A file is a `N R` header (particle count and blockade radius) followed
//! by either `N` lines of `x y z` positions (two particles interfere when
//! within distance `R`) or a line reading `edges` followed by explicit
//! 1-based `i j` pairs, one per line. `#` starts a comment anywhere; blank
//! lines are ignored. In the `edges` form the radius is recorded but not
//! used to build the graph.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rydnet_core::InterferenceGraph;

/// Reads and parses a graph file.
pub fn read_graph(path: &Path) -> Result<InterferenceGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read graph file {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("in graph file {}", path.display()))
}

/// Parses the graph text format.
pub fn parse_graph(text: &str) -> Result<InterferenceGraph> {
    // (1-based line number, content) with comments and blanks stripped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, header) = lines.next().context("empty graph file: expected a 'N R' header")?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .with_context(|| format!("line {line_no}: expected 'N R'"))?
        .parse()
        .with_context(|| format!("line {line_no}: particle count must be an integer"))?;
    let r: f64 = parts
        .next()
        .with_context(|| format!("line {line_no}: expected a radius after the particle count"))?
        .parse()
        .with_context(|| format!("line {line_no}: radius must be a number"))?;
    if let Some(extra) = parts.next() {
        bail!("line {line_no}: unexpected token {extra:?} after 'N R'");
    }

    let mut body = lines.peekable();
    match body.peek() {
        Some((_, l)) if l.eq_ignore_ascii_case("edges") => {
            body.next();
            let mut edges = Vec::new();
            for (line_no, line) in body {
                let mut parts = line.split_whitespace();
                let i: usize = parts
                    .next()
                    .with_context(|| format!("line {line_no}: expected 'i j'"))?
                    .parse()
                    .with_context(|| format!("line {line_no}: endpoints must be integers"))?;
                let j: usize = parts
                    .next()
                    .with_context(|| format!("line {line_no}: expected two endpoints"))?
                    .parse()
                    .with_context(|| format!("line {line_no}: endpoints must be integers"))?;
                if let Some(extra) = parts.next() {
                    bail!("line {line_no}: unexpected token {extra:?} after the edge");
                }
                if i == 0 || j == 0 || i > n || j > n {
                    bail!("line {line_no}: edge {i} {j} out of range 1..={n}");
                }
                edges.push((i - 1, j - 1));
            }
            Ok(InterferenceGraph::from_edges(n, &edges)?)
        }
        _ => {
            let mut positions = Vec::with_capacity(n);
            for (line_no, line) in body {
                if positions.len() == n {
                    bail!("line {line_no}: more than {n} position lines");
                }
                let mut parts = line.split_whitespace();
                let mut coord = [0.0f64; 3];
                for c in &mut coord {
                    *c = parts
                        .next()
                        .with_context(|| format!("line {line_no}: expected 'x y z'"))?
                        .parse()
                        .with_context(|| format!("line {line_no}: coordinates must be numbers"))?;
                }
                if let Some(extra) = parts.next() {
                    bail!("line {line_no}: unexpected token {extra:?} after the position");
                }
                positions.push(coord);
            }
            if positions.len() != n {
                bail!("header says {n} particles but the file has {} position lines", positions.len());
            }
            Ok(InterferenceGraph::unit_disk(&positions, r)?)
        }
    }
}

/// Renders a graph back into the text format: positions when the graph
/// has geometry, the `edges` form otherwise (radius written as 0).
pub fn write_graph(graph: &InterferenceGraph) -> String {
    let mut out = String::new();
    match (graph.positions(), graph.radius()) {
        (Some(positions), Some(radius)) => {
            let _ = writeln!(out, "{} {}", graph.n_particles(), radius);
            for p in positions {
                let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
            }
        }
        _ => {
            let _ = writeln!(out, "{} 0", graph.n_particles());
            let _ = writeln!(out, "edges");
            for (i, j) in graph.edges() {
                let _ = writeln!(out, "{} {}", i + 1, j + 1);
            }
        }
    }
    out
}
