//! Graph file format and CSV emitters.
//!
//! Graph files are UTF-8 JSON:
//! `{"n": int, "measure": [float; n], "edges": [[u, v, w], ...], "boundary": [int]}`
//! with `u < v` and `boundary` optional.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BuildOptions, Edge, GraphError, WeightedGraph};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("edges[{index}]: expected u < v, got [{u}, {v}]")]
    Orientation { index: usize, u: usize, v: usize },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    measure: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary: Option<Vec<usize>>,
}

pub fn read_graph<R: Read>(reader: R, opts: BuildOptions) -> Result<WeightedGraph, FormatError> {
    let file: GraphFile = serde_json::from_reader(reader)?;
    if let Some((index, &(u, v, _))) = file.edges.iter().enumerate().find(|(_, e)| e.0 >= e.1) {
        // self-loops get the graph-level message
        if u != v {
            return Err(FormatError::Orientation { index, u, v });
        }
    }
    let edges = file.edges.iter().map(|&(u, v, w)| Edge::new(u, v, w)).collect();
    let boundary = file.boundary.unwrap_or_default();
    Ok(WeightedGraph::from_parts_with(file.n, edges, file.measure, &boundary, opts)?)
}

pub fn parse_graph(text: &str, opts: BuildOptions) -> Result<WeightedGraph, FormatError> {
    read_graph(text.as_bytes(), opts)
}

pub fn write_graph<W: Write>(g: &WeightedGraph, writer: W) -> Result<(), FormatError> {
    let boundary = g.boundary_vertices();
    let file = GraphFile {
        n: g.n(),
        measure: g.measure().to_vec(),
        edges: g.edges().iter().map(|e| (e.u, e.v, e.w)).collect(),
        boundary: (!boundary.is_empty()).then_some(boundary),
    };
    serde_json::to_writer(writer, &file)?;
    Ok(())
}

pub fn graph_to_string(g: &WeightedGraph) -> String {
    let mut buf = Vec::new();
    write_graph(g, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// `vertex,dist` rows; unreachable vertices print `inf`.
pub fn write_distance_csv<W: Write>(dist: &[Option<f64>], mut w: W) -> std::io::Result<()> {
    writeln!(w, "vertex,dist")?;
    for (x, d) in dist.iter().enumerate() {
        match d {
            Some(d) => writeln!(w, "{x},{d}")?,
            None => writeln!(w, "{x},inf")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_keeps_boundary() {
        let text = r#"{"n":3,"measure":[1,2,1],"edges":[[0,1,1.5],[1,2,1]],"boundary":[2]}"#;
        let g = parse_graph(text, BuildOptions::default()).unwrap();
        assert_eq!(g.boundary_vertices(), vec![2]);
        let back = parse_graph(&graph_to_string(&g), BuildOptions::default()).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.measure(), g.measure());
        assert_eq!(back.boundary_vertices(), vec![2]);
    }

    #[test]
    fn positional_errors() {
        let err = parse_graph(r#"{"n":2,"measure":[1,1],"edges":[[1,0,1]]}"#, BuildOptions::default())
            .unwrap_err();
        assert_eq!(err.to_string(), "edges[0]: expected u < v, got [1, 0]");

        let err = parse_graph(r#"{"n":2,"measure":[1,1],"edges":[[0,0,1]]}"#, BuildOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains("edges[0] is a self-loop"), "{err}");

        let err = parse_graph(r#"{"n":2,"measure":[1],"edges":[]}"#, BuildOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains("measure has 1 entries"), "{err}");

        let err = parse_graph(r#"{"n":2,"measure":[1,1],"edges":[[0,1]]}"#, BuildOptions::default())
            .unwrap_err();
        assert!(matches!(err, FormatError::Json(_)));
    }

    #[test]
    fn distance_csv() {
        let mut out = Vec::new();
        write_distance_csv(&[Some(0.0), Some(1.5), None], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "vertex,dist\n0,0\n1,1.5\n2,inf\n");
    }
}
