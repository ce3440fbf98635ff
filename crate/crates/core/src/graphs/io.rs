//! Graph interchange formats.
//!
//! Edge-list text: first line `N <n_nodes>`, then one `i j` pair per line
//! with 1-based labels and i < j, newline-terminated. JSON mirrors the
//! same convention: `{"n_nodes": n, "edges": [[i, j], ...]}`.

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{Error, Result};

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("N {}\n", g.n_nodes());
    for &(a, b) in g.edges() {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("edge_list", "empty input"))?;
    let n: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["N", count] => count
            .parse()
            .map_err(|_| Error::parse("edge_list", format!("bad node count `{count}`")))?,
        _ => {
            return Err(Error::parse(
                "edge_list",
                format!("expected `N <count>` header, got `{header}`"),
            ))
        }
    };
    let mut edges = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                "edge_list",
                format!("line {}: expected `i j`, got `{line}`", lineno + 2),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse("edge_list", format!("bad node id `{}`", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse("edge_list", format!("bad node id `{}`", fields[1])))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::parse(
                "edge_list",
                format!("node id out of range 1..={n} on line {}", lineno + 2),
            ));
        }
        if i >= j {
            return Err(Error::parse(
                "edge_list",
                format!("edges must satisfy i < j on line {}", lineno + 2),
            ));
        }
        edges.push((i - 1, j - 1));
    }
    Graph::new(n, edges)
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

pub fn to_json(g: &Graph) -> String {
    let doc = GraphJson {
        n_nodes: g.n_nodes(),
        edges: g.edges().iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
    };
    serde_json::to_string(&doc).expect("graph serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Graph> {
    let doc: GraphJson =
        serde_json::from_str(text).map_err(|e| Error::parse("graph_json", e.to_string()))?;
    for &(i, j) in &doc.edges {
        if i == 0 || j == 0 {
            return Err(Error::parse("graph_json", "node ids are 1-based"));
        }
    }
    Graph::new(
        doc.n_nodes,
        doc.edges.iter().map(|&(i, j)| (i - 1, j - 1)),
    )
}

#[cfg(test)]
mod tests {
    use super::super::complete_graph;
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = complete_graph(4).unwrap();
        let text = to_edge_list(&g);
        assert!(text.starts_with("N 4\n"));
        assert!(text.ends_with('\n'));
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("N 3\n1 1\n").is_err()); // self-loop
        assert!(parse_edge_list("N 3\n2 1\n").is_err()); // i >= j
        assert!(parse_edge_list("N 3\n1 2\n1 2\n").is_err()); // duplicate
        assert!(parse_edge_list("N 3\n1 4\n").is_err()); // out of range
        assert!(parse_edge_list("N 3\n0 2\n").is_err()); // ids are 1-based
    }

    #[test]
    fn json_round_trip() {
        let g = complete_graph(3).unwrap();
        let text = to_json(&g);
        assert_eq!(from_json(&text).unwrap(), g);
        assert!(from_json(r#"{"n_nodes": 2, "edges": [[1,1]]}"#).is_err());
        assert!(from_json(r#"{"n_nodes": 2, "edges": [[0,1]]}"#).is_err());
    }
}
