//! Edge-list files: `n m` header, then one `u v` line per edge with `u < v`.

use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Graph, GraphError};
use crate::NodeId;

#[derive(Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    Malformed(String),
    OutOfRange { id: u64, n: usize },
    SelfLoop(u64),
    Duplicate(u64, u64),
    NotAscending(u64, u64),
    EdgeCountMismatch { declared: usize, found: usize },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::MissingHeader => write!(f, "missing `n m` header"),
            ParseErrorKind::Malformed(s) => write!(f, "malformed line: {s}"),
            ParseErrorKind::OutOfRange { id, n } => write!(f, "node id {id} out of range for n = {n}"),
            ParseErrorKind::SelfLoop(u) => write!(f, "self-loop at node {u}"),
            ParseErrorKind::Duplicate(u, v) => write!(f, "duplicate edge {u} {v}"),
            ParseErrorKind::NotAscending(u, v) => write!(f, "edge {u} {v} must satisfy u < v"),
            ParseErrorKind::EdgeCountMismatch { declared, found } => {
                write!(f, "header declares {declared} edges, file has {found}")
            }
        }
    }
}

fn parse_err(line: usize, kind: ParseErrorKind) -> GraphError {
    GraphError::Parse { line, kind }
}

pub fn load_graph(path: &Path) -> Result<Graph, GraphError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (n, m) = match lines.next() {
        None => return Err(parse_err(1, ParseErrorKind::MissingHeader)),
        Some((_, line)) => {
            let line = line?;
            let mut it = line.split_ascii_whitespace();
            let n = it.next().and_then(|t| t.parse::<usize>().ok());
            let m = it.next().and_then(|t| t.parse::<usize>().ok());
            match (n, m, it.next()) {
                (Some(n), Some(m), None) => (n, m),
                _ => return Err(parse_err(1, ParseErrorKind::Malformed(line))),
            }
        }
    };

    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_ascii_whitespace();
        let u = it.next().and_then(|t| t.parse::<u64>().ok());
        let v = it.next().and_then(|t| t.parse::<u64>().ok());
        let (u, v) = match (u, v, it.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(parse_err(lineno, ParseErrorKind::Malformed(line))),
        };
        if u == v {
            return Err(parse_err(lineno, ParseErrorKind::SelfLoop(u)));
        }
        if u > v {
            return Err(parse_err(lineno, ParseErrorKind::NotAscending(u, v)));
        }
        if v >= n as u64 {
            return Err(parse_err(lineno, ParseErrorKind::OutOfRange { id: v, n }));
        }
        if !seen.insert((u, v)) {
            return Err(parse_err(lineno, ParseErrorKind::Duplicate(u, v)));
        }
        edges.push((u as NodeId, v as NodeId));
    }
    if edges.len() != m {
        return Err(parse_err(
            edges.len() + 2,
            ParseErrorKind::EdgeCountMismatch { declared: m, found: edges.len() },
        ));
    }
    Graph::from_edges(n, &edges)
}

pub fn save_graph(graph: &Graph, path: &Path) -> Result<(), GraphError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{} {}", graph.n(), graph.m())?;
    for (u, v) in graph.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GenModel};

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("mpcsim-io-{}-{name}", std::process::id()));
        p
    }

    #[test]
    fn round_trip_preserves_graph() {
        let g = gen_graph(&GenModel::Gnp { n: 200, p: 0.03 }, 5).unwrap();
        let path = tmp("roundtrip.txt");
        save_graph(&g, &path).unwrap();
        let g2 = load_graph(&path).unwrap();
        assert_eq!(g, g2);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn loads_documented_example() {
        let path = tmp("path3.txt");
        std::fs::write(&path, "3 2\n0 1\n1 2\n").unwrap();
        let g = load_graph(&path).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.neighbors(1), &[0, 2]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn self_loop_reports_line_number() {
        let path = tmp("selfloop.txt");
        std::fs::write(&path, "2 1\n0 0\n").unwrap();
        match load_graph(&path) {
            Err(GraphError::Parse { line: 2, kind: ParseErrorKind::SelfLoop(0) }) => {}
            other => panic!("expected self-loop at line 2, got {other:?}"),
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn rejects_duplicates_and_bad_ids() {
        let path = tmp("dup.txt");
        std::fs::write(&path, "3 2\n0 1\n0 1\n").unwrap();
        assert!(matches!(
            load_graph(&path),
            Err(GraphError::Parse { line: 3, kind: ParseErrorKind::Duplicate(0, 1) })
        ));
        std::fs::write(&path, "3 1\n0 7\n").unwrap();
        assert!(matches!(
            load_graph(&path),
            Err(GraphError::Parse { line: 2, kind: ParseErrorKind::OutOfRange { id: 7, n: 3 } })
        ));
        std::fs::write(&path, "3 1\n1 0\n").unwrap();
        assert!(matches!(
            load_graph(&path),
            Err(GraphError::Parse { line: 2, kind: ParseErrorKind::NotAscending(1, 0) })
        ));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn writer_emits_sorted_edges() {
        let g = Graph::from_edges(4, &[(2, 3), (0, 3), (0, 1)]).unwrap();
        let path = tmp("sorted.txt");
        save_graph(&g, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "4 3\n0 1\n0 3\n2 3\n");
        std::fs::remove_file(path).ok();
    }
}
