//! Weighted graphs: the data of a pure-jump Dirichlet form on a discrete set.
//!
//! A graph is a symmetric weight `b(x, y) > 0` on a finite set of unordered
//! pairs together with a vertex measure `m(x) > 0`. Vertices are dense
//! indices `0..n`. Edges are stored once (with `u < v`) and expanded into a
//! compressed adjacency so that every vertex sees each incident edge from its
//! own side.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("measure has {found} entries, expected {expected}")]
    MeasureLength { expected: usize, found: usize },
    #[error("measure[{vertex}] = {value} is not a positive finite number")]
    NonPositiveMeasure { vertex: usize, value: f64 },
    #[error("edges[{edge}] references vertex {vertex}, but the graph has {n} vertices")]
    DanglingIndex { edge: usize, vertex: usize, n: usize },
    #[error("edges[{edge}] is a self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edges[{edge}] has weight {weight}; weights must be positive and finite")]
    NonPositiveWeight { edge: usize, weight: f64 },
    #[error("edges[{edge}] duplicates edges[{first}] (pair {u}-{v})")]
    DuplicateEdge { edge: usize, first: usize, u: usize, v: usize },
    #[error("boundary entry {vertex} is out of range for {n} vertices")]
    DanglingBoundary { vertex: usize, n: usize },
    #[error("graph is disconnected ({components} components); enable per-component analysis to proceed")]
    Disconnected { components: usize },
    #[error("vertex {vertex} is isolated (weighted degree 0)")]
    IsolatedVertex { vertex: usize },
    #[error("vertex {vertex} is out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("invalid sphere profile: {0}")]
    InvalidProfile(String),
    #[error(
        "resource cap exceeded: {vertices} vertices / {edges} edges requested, caps are {max_vertices} / {max_edges}"
    )]
    ResourceCap { vertices: u64, edges: u64, max_vertices: u64, max_edges: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        Edge { u, v, w }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Accept graphs with several connected components.
    pub allow_disconnected: bool,
}

/// One incident edge as seen from a vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub vertex: usize,
    pub weight: f64,
    /// Index into [`WeightedGraph::edges`].
    pub edge: usize,
}

#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    measure: Vec<f64>,
    boundary: Vec<bool>,
    offsets: Vec<usize>,
    nbrs: Vec<Neighbor>,
    degree: Vec<f64>,
}

impl WeightedGraph {
    /// Validates and builds a connected graph without boundary markers.
    pub fn from_parts(n: usize, edges: Vec<Edge>, measure: Vec<f64>) -> Result<Self, GraphError> {
        Self::from_parts_with(n, edges, measure, &[], BuildOptions::default())
    }

    /// Validates and builds a graph.
    ///
    /// Edges may be given in either orientation; they are stored with
    /// `u < v`. Errors name the first offending entry.
    pub fn from_parts_with(
        n: usize,
        mut edges: Vec<Edge>,
        measure: Vec<f64>,
        boundary: &[usize],
        opts: BuildOptions,
    ) -> Result<Self, GraphError> {
        if measure.len() != n {
            return Err(GraphError::MeasureLength { expected: n, found: measure.len() });
        }
        if let Some((vertex, &value)) =
            measure.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(GraphError::NonPositiveMeasure { vertex, value });
        }
        for (i, e) in edges.iter_mut().enumerate() {
            for vertex in [e.u, e.v] {
                if vertex >= n {
                    return Err(GraphError::DanglingIndex { edge: i, vertex, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { edge: i, vertex: e.u });
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(GraphError::NonPositiveWeight { edge: i, weight: e.w });
            }
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        let mut mask = vec![false; n];
        for &b in boundary {
            if b >= n {
                return Err(GraphError::DanglingBoundary { vertex: b, n });
            }
            mask[b] = true;
        }

        let g = Self::assemble(n, edges, measure, mask);
        g.check_duplicates()?;
        if !opts.allow_disconnected {
            let components = g.component_count();
            if components > 1 {
                return Err(GraphError::Disconnected { components });
            }
        }
        Ok(g)
    }

    /// Builds without validation. Generators use this; their output is
    /// valid by construction and checked against `from_parts_with` in tests.
    pub(crate) fn from_trusted(
        n: usize,
        edges: Vec<Edge>,
        measure: Vec<f64>,
        boundary: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(measure.len(), n);
        debug_assert_eq!(boundary.len(), n);
        Self::assemble(n, edges, measure, boundary)
    }

    fn assemble(n: usize, edges: Vec<Edge>, measure: Vec<f64>, boundary: Vec<bool>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.u + 1] += 1;
            offsets[e.v + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let placeholder = Neighbor { vertex: 0, weight: 0.0, edge: 0 };
        let mut nbrs = vec![placeholder; offsets[n]];
        let mut cursor = offsets.clone();
        for (idx, e) in edges.iter().enumerate() {
            nbrs[cursor[e.u]] = Neighbor { vertex: e.v, weight: e.w, edge: idx };
            cursor[e.u] += 1;
            nbrs[cursor[e.v]] = Neighbor { vertex: e.u, weight: e.w, edge: idx };
            cursor[e.v] += 1;
        }
        let degree = (0..n)
            .map(|x| nbrs[offsets[x]..offsets[x + 1]].iter().map(|nb| nb.weight).sum())
            .collect();
        WeightedGraph { n, edges, measure, boundary, offsets, nbrs, degree }
    }

    fn check_duplicates(&self) -> Result<(), GraphError> {
        let mut first: Option<GraphError> = None;
        let mut scratch: Vec<(usize, usize)> = Vec::new();
        for x in 0..self.n {
            scratch.clear();
            scratch.extend(self.neighbors(x).iter().map(|nb| (nb.vertex, nb.edge)));
            scratch.sort_unstable();
            for pair in scratch.windows(2) {
                if pair[0].0 == pair[1].0 {
                    let (a, b) = (pair[0].1, pair[1].1);
                    let e = &self.edges[b];
                    let err = GraphError::DuplicateEdge { edge: b, first: a, u: e.u, v: e.v };
                    // report the lowest offending edge index
                    match &first {
                        Some(GraphError::DuplicateEdge { edge, .. }) if *edge <= b => {}
                        _ => first = Some(err),
                    }
                }
            }
        }
        first.map_or(Ok(()), Err)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn neighbors(&self, x: usize) -> &[Neighbor] {
        &self.nbrs[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn is_boundary(&self, x: usize) -> bool {
        self.boundary[x]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.boundary[x]).collect()
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.iter().any(|&b| b)
    }

    pub fn check_vertex(&self, x: usize) -> Result<(), GraphError> {
        if x < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: x, n: self.n })
        }
    }

    /// Weighted degree `n(x) = Σ_y b(x, y)`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.degree[x]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.degree
    }

    /// Generalized degree `Deg(x) = n(x) / m(x)`; undefined on isolated vertices.
    pub fn generalized_degree(&self, x: usize) -> Result<f64, GraphError> {
        self.check_vertex(x)?;
        let d = self.degree[x];
        if d > 0.0 {
            Ok(d / self.measure[x])
        } else {
            Err(GraphError::IsolatedVertex { vertex: x })
        }
    }

    pub fn max_generalized_degree(&self) -> f64 {
        (0..self.n).map(|x| self.degree[x] / self.measure[x]).fold(0.0, f64::max)
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// Component label per vertex, labels assigned in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for nb in self.neighbors(x) {
                    if label[nb.vertex] == usize::MAX {
                        label[nb.vertex] = next;
                        stack.push(nb.vertex);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> WeightedGraph {
        WeightedGraph::from_parts(
            3,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)],
            vec![1.0; 3],
        )
        .unwrap()
    }

    #[test]
    fn minimal_graph() {
        let g = WeightedGraph::from_parts(2, vec![Edge::new(0, 1, 1.0)], vec![1.0, 1.0]).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn path_degrees() {
        let g = p3();
        assert_eq!(g.weighted_degree(1), 2.0);
        assert_eq!(g.generalized_degree(1).unwrap(), 2.0);
        assert_eq!(g.weighted_degree(0), 1.0);
        assert_eq!(g.generalized_degree(0).unwrap(), 1.0);
    }

    #[test]
    fn validation_errors_are_distinct() {
        let e = WeightedGraph::from_parts(2, vec![Edge::new(0, 0, 1.0)], vec![1.0, 1.0]);
        assert_eq!(e.unwrap_err(), GraphError::SelfLoop { edge: 0, vertex: 0 });

        let e = WeightedGraph::from_parts(2, vec![Edge::new(0, 1, 0.0)], vec![1.0, 1.0]);
        assert!(matches!(e, Err(GraphError::NonPositiveWeight { edge: 0, .. })));

        let e = WeightedGraph::from_parts(2, vec![Edge::new(0, 1, 1.0)], vec![1.0, -1.0]);
        assert!(matches!(e, Err(GraphError::NonPositiveMeasure { vertex: 1, .. })));

        let e = WeightedGraph::from_parts(2, vec![Edge::new(0, 5, 1.0)], vec![1.0, 1.0]);
        assert_eq!(e.unwrap_err(), GraphError::DanglingIndex { edge: 0, vertex: 5, n: 2 });

        let e = WeightedGraph::from_parts(
            3,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(1, 0, 2.0)],
            vec![1.0; 3],
        );
        assert_eq!(e.unwrap_err(), GraphError::DuplicateEdge { edge: 2, first: 0, u: 0, v: 1 });

        let e = WeightedGraph::from_parts(3, vec![Edge::new(0, 1, 1.0)], vec![1.0; 3]);
        assert_eq!(e.unwrap_err(), GraphError::Disconnected { components: 2 });
    }

    #[test]
    fn disconnected_allowed_with_flag() {
        let g = WeightedGraph::from_parts_with(
            3,
            vec![Edge::new(0, 1, 1.0)],
            vec![1.0; 3],
            &[],
            BuildOptions { allow_disconnected: true },
        )
        .unwrap();
        assert_eq!(g.components(), vec![0, 0, 1]);
        assert_eq!(g.generalized_degree(2), Err(GraphError::IsolatedVertex { vertex: 2 }));
    }

    #[test]
    fn degrees_agree_from_both_orientations() {
        let g = WeightedGraph::from_parts(
            4,
            vec![Edge::new(2, 0, 0.5), Edge::new(1, 2, 2.0), Edge::new(3, 2, 1.5)],
            vec![1.0; 4],
        )
        .unwrap();
        let mut from_edges = [0.0; 4];
        for e in g.edges() {
            assert!(e.u < e.v);
            from_edges[e.u] += e.w;
            from_edges[e.v] += e.w;
        }
        assert_eq!(g.weighted_degrees(), &from_edges);
    }
}
