use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::warn;

use super::{GraphBuilder, MultiplexGraph, DEFAULT_ATTR};
use crate::error::{Error, Result};

/// Column layout of an edge file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeFormat {
    /// `src dst layer`
    #[default]
    Plain,
    /// CoMuNe archive ordering, `layer src dst weight`; the weight is ignored.
    Comune,
}

/// Warnings collected while loading.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops: usize,
    pub duplicate_edges: usize,
    pub unknown_attribute_nodes: usize,
}

fn fields(line: &str) -> Vec<&str> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    line.split_whitespace().collect()
}

/// Parses edge-file text into `builder`. Returns the number of duplicate
/// triples seen.
pub fn parse_edges(
    text: &str,
    path: &Path,
    format: EdgeFormat,
    builder: &mut GraphBuilder,
) -> Result<usize> {
    let mut duplicates = 0;
    let mut seen = std::collections::HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let f = fields(line);
        if f.is_empty() {
            continue;
        }
        let (src, dst, layer) = match (format, f.len()) {
            (EdgeFormat::Plain, 3) => (f[0], f[1], f[2]),
            (EdgeFormat::Comune, 3 | 4) => (f[1], f[2], f[0]),
            (EdgeFormat::Plain, n) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected `src dst layer`, found {n} fields"),
                })
            }
            (EdgeFormat::Comune, n) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected `layer src dst weight`, found {n} fields"),
                })
            }
        };
        if format == EdgeFormat::Comune && f.len() == 4 && f[3].parse::<f64>().is_err() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("weight `{}` is not a number", f[3]),
            });
        }
        let key = if builder.directed || src <= dst {
            (src, dst, layer)
        } else {
            (dst, src, layer)
        };
        if src != dst && !seen.insert(key) {
            duplicates += 1;
        }
        builder.add_edge(src, dst, layer);
    }
    Ok(duplicates)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn apply_attributes(text: &str, path: &Path, builders: &mut [GraphBuilder]) -> Result<usize> {
    let mut unknown = 0;
    for (i, line) in text.lines().enumerate() {
        let f = fields(line);
        match f.len() {
            0 => continue,
            2 => {
                let mut known = false;
                for b in builders.iter_mut() {
                    known |= b.set_attr(f[0], f[1]);
                }
                if !known {
                    unknown += 1;
                }
            }
            n => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected `node attribute`, found {n} fields"),
                })
            }
        }
    }
    Ok(unknown)
}

fn report_warnings(report: &LoadReport, path: &Path) {
    if report.self_loops > 0 {
        warn!("{}: dropped {} self-loops", path.display(), report.self_loops);
    }
    if report.duplicate_edges > 0 {
        warn!("{}: merged {} duplicate edges", path.display(), report.duplicate_edges);
    }
    if report.unknown_attribute_nodes > 0 {
        warn!(
            "{}: ignored attributes for {} unknown nodes",
            path.display(),
            report.unknown_attribute_nodes
        );
    }
}

/// Loads an edge file and an optional attribute file.
///
/// Nodes without an attribute get [`DEFAULT_ATTR`]. Self-loops are dropped and
/// duplicate triples merged; both are counted in the report.
pub fn load_graph(
    edge_path: &Path,
    attr_path: Option<&Path>,
    directed: bool,
    format: EdgeFormat,
) -> Result<(MultiplexGraph, LoadReport)> {
    let mut builder = GraphBuilder::new(directed);
    let duplicate_edges = parse_edges(&read(edge_path)?, edge_path, format, &mut builder)?;
    let mut builders = vec![builder];
    let unknown_attribute_nodes = match attr_path {
        Some(p) => apply_attributes(&read(p)?, p, &mut builders)?,
        None => 0,
    };
    let report = LoadReport {
        self_loops: builders[0].self_loops(),
        duplicate_edges,
        unknown_attribute_nodes,
    };
    report_warnings(&report, edge_path);
    Ok((builders.pop().unwrap().build(), report))
}

/// Loads two snapshots of the same network over a joint vocabulary.
pub fn load_graph_pair(
    first: &Path,
    second: &Path,
    attr_path: Option<&Path>,
    directed: bool,
    format: EdgeFormat,
) -> Result<(MultiplexGraph, MultiplexGraph, LoadReport)> {
    let mut a = GraphBuilder::new(directed);
    let mut b = GraphBuilder::new(directed);
    let mut duplicate_edges = parse_edges(&read(first)?, first, format, &mut a)?;
    duplicate_edges += parse_edges(&read(second)?, second, format, &mut b)?;
    let mut builders = vec![a, b];
    let unknown_attribute_nodes = match attr_path {
        Some(p) => apply_attributes(&read(p)?, p, &mut builders)?,
        None => 0,
    };
    let report = LoadReport {
        self_loops: builders.iter().map(|b| b.self_loops()).sum(),
        duplicate_edges,
        unknown_attribute_nodes,
    };
    report_warnings(&report, first);
    let mut graphs = GraphBuilder::build_all(builders);
    let second = graphs.pop().unwrap();
    let first = graphs.pop().unwrap();
    Ok((first, second, report))
}

/// Serializes logical edges as `src dst layer` lines.
pub fn write_edges(g: &MultiplexGraph) -> String {
    let mut out = String::new();
    for e in g.links() {
        let _ = writeln!(
            out,
            "{} {} {}",
            g.node_name(e.src),
            g.node_name(e.dst),
            g.layer_name(e.layer)
        );
    }
    out
}

/// Serializes non-default node attributes as `node attribute` lines.
pub fn write_attributes(g: &MultiplexGraph) -> String {
    let mut out = String::new();
    for &u in g.nodes() {
        let a = g.attr_name(g.attr(u));
        if a != DEFAULT_ATTR {
            let _ = writeln!(out, "{} {}", g.node_name(u), a);
        }
    }
    out
}
