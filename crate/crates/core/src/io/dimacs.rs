//! DIMACS `.col` reader and writer.

use log::warn;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Parses a DIMACS edge file. Duplicate and reversed edges collapse into one; a declared
/// edge count that disagrees with the edge lines is logged, not rejected.
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut graph: Option<(Graph, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        let mut tok = line.split_whitespace();
        match tok.next() {
            None | Some("c") => {}
            Some("p") => {
                if graph.is_some() {
                    return Err(Error::parse(line_no, "second problem line"));
                }
                let _format = tok.next().ok_or_else(|| Error::parse(line_no, "missing format"))?;
                let n = parse_count(tok.next(), line_no, "node count")?;
                let m = parse_count(tok.next(), line_no, "edge count")?;
                graph = Some((Graph::new(n).map_err(|e| Error::parse(line_no, e.to_string()))?, m));
            }
            Some("e") => {
                let (g, _) =
                    graph.as_mut().ok_or_else(|| Error::parse(line_no, "edge line before the problem line"))?;
                let u = parse_node(tok.next(), g.n(), line_no)?;
                let v = parse_node(tok.next(), g.n(), line_no)?;
                if u == v {
                    warn!("line {line_no}: ignoring self-loop on node {}", u + 1);
                    continue;
                }
                g.add_edge(u, v)?;
            }
            Some(other) => warn!("line {line_no}: ignoring unrecognized line type {other:?}"),
        }
    }
    let (g, declared) = graph.ok_or_else(|| Error::parse(0, "missing `p edge N M` line"))?;
    if declared != g.edge_count() {
        warn!("declared {declared} edges, found {} distinct edges", g.edge_count());
    }
    Ok(g)
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what}")))
}

fn parse_node(tok: Option<&str>, n: usize, line: usize) -> Result<usize> {
    let id: usize = parse_count(tok, line, "node id")?;
    if id == 0 || id > n {
        return Err(Error::parse(line, format!("node id {id} outside 1..={n}")));
    }
    Ok(id - 1)
}

pub fn emit_dimacs(g: &Graph) -> String {
    use std::fmt::Write;
    let mut out = format!("p edge {} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = parse_dimacs("c tiny\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert_eq!(g, Graph::complete(3).unwrap());
    }

    #[test]
    fn duplicates_collapse() {
        let g = parse_dimacs("p edge 3 3\ne 1 2\ne 2 1\ne 1 2\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn missing_problem_line() {
        assert!(parse_dimacs("c nothing\ne 1 2\n").is_err());
        assert!(parse_dimacs("").is_err());
    }

    #[test]
    fn node_out_of_range() {
        assert!(matches!(parse_dimacs("p edge 3 1\ne 1 4\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_dimacs("p edge 3 1\ne 0 1\n").is_err());
    }

    #[test]
    fn emit_then_parse() {
        let g = Graph::from_edges(5, [(0, 4), (1, 2), (3, 4)]).unwrap();
        let text = emit_dimacs(&g);
        assert!(text.starts_with("p edge 5 3\n"));
        assert_eq!(parse_dimacs(&text).unwrap(), g);
    }
}
