//! Pseudo metrics on graphs: hop distance, edge-length path metrics, the
//! adaptedness inequality and jump sizes.
//!
//! A path metric is determined by a positive length on every edge; the
//! distance between two vertices is the least total length of a path. A
//! metric is *adapted* to the graph under the half convention when
//! `½ Σ_y b(x,y) ρ(x,y)² ≤ m(x)` at every vertex, and under the full
//! convention when the same holds without the ½. The Huang-type lengths
//! `min{Deg(x)^{-1/2}, Deg(y)^{-1/2}}` always satisfy the full convention.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::graph::{GraphError, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{found} edge lengths given for {expected} edges")]
    LengthCount { expected: usize, found: usize },
    #[error("edge {edge} has length {length}; lengths must be finite and non-negative")]
    BadLength { edge: usize, length: f64 },
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("jump size needs positive lengths; edge {edge} has length {length}")]
    ZeroJump { edge: usize, length: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLengthRule {
    Natural,
    Huang,
    Custom,
}

impl fmt::Display for EdgeLengthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeLengthRule::Natural => "natural",
            EdgeLengthRule::Huang => "huang",
            EdgeLengthRule::Custom => "custom",
        })
    }
}

impl FromStr for EdgeLengthRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natural" => Ok(EdgeLengthRule::Natural),
            "huang" => Ok(EdgeLengthRule::Huang),
            "custom" => Ok(EdgeLengthRule::Custom),
            _ => Err(format!("unknown metric {s:?} (expected natural|huang)")),
        }
    }
}

/// Which form of the adaptedness inequality a metric is meant to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `½ Σ_y b(x,y) ρ(x,y)² ≤ m(x)`.
    Half,
    /// `Σ_y b(x,y) ρ(x,y)² ≤ m(x)`; all bounds may then be halved.
    Full,
}

impl Convention {
    pub fn factor(self) -> f64 {
        match self {
            Convention::Half => 0.5,
            Convention::Full => 1.0,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Half => "half",
            Convention::Full => "full",
        })
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half" => Ok(Convention::Half),
            "full" => Ok(Convention::Full),
            _ => Err(format!("unknown convention {s:?} (expected half|full)")),
        }
    }
}

/// Per-edge lengths, indexed like [`WeightedGraph::edges`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeLengths {
    pub rule: EdgeLengthRule,
    /// Convention the rule is designed for.
    pub convention: Convention,
    pub values: Vec<f64>,
}

impl EdgeLengths {
    pub fn natural(g: &WeightedGraph) -> Self {
        EdgeLengths {
            rule: EdgeLengthRule::Natural,
            convention: Convention::Half,
            values: vec![1.0; g.edge_count()],
        }
    }

    pub fn custom(
        g: &WeightedGraph,
        values: Vec<f64>,
        convention: Convention,
    ) -> Result<Self, MetricError> {
        if values.len() != g.edge_count() {
            return Err(MetricError::LengthCount { expected: g.edge_count(), found: values.len() });
        }
        if let Some((edge, &length)) =
            values.iter().enumerate().find(|(_, l)| !(l.is_finite() && **l >= 0.0))
        {
            return Err(MetricError::BadLength { edge, length });
        }
        Ok(EdgeLengths { rule: EdgeLengthRule::Custom, convention, values })
    }

    pub fn for_rule(g: &WeightedGraph, rule: EdgeLengthRule) -> Result<Self, MetricError> {
        match rule {
            EdgeLengthRule::Natural => Ok(Self::natural(g)),
            EdgeLengthRule::Huang => huang_lengths(g),
            EdgeLengthRule::Custom => Err(MetricError::LengthCount {
                expected: g.edge_count(),
                found: 0,
            }),
        }
    }

    /// Multiplies every length by `t`; the result is a custom metric.
    pub fn scaled(&self, t: f64) -> Self {
        EdgeLengths {
            rule: EdgeLengthRule::Custom,
            convention: self.convention,
            values: self.values.iter().map(|l| l * t).collect(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.values.iter().all(|&l| l == 1.0)
    }
}

/// Distances from a root. `None` marks vertices in another component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoMetric {
    pub root: usize,
    pub dist: Vec<Option<f64>>,
    pub rule: EdgeLengthRule,
    pub convention: Convention,
}

impl PseudoMetric {
    pub fn get(&self, x: usize) -> Option<f64> {
        self.dist[x]
    }

    /// Largest finite distance.
    pub fn eccentricity(&self) -> f64 {
        self.dist.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Smallest distance to a boundary vertex, `None` when there is none.
    pub fn boundary_distance(&self, g: &WeightedGraph) -> Option<f64> {
        (0..g.n())
            .filter(|&x| g.is_boundary(x))
            .filter_map(|x| self.dist[x])
            .min_by(f64::total_cmp)
    }
}

/// Hop distances by breadth-first search.
pub fn natural_distance(g: &WeightedGraph, root: usize) -> Result<PseudoMetric, MetricError> {
    g.check_vertex(root)?;
    let mut hops = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::from([root]);
    hops[root] = 0;
    while let Some(x) = queue.pop_front() {
        for nb in g.neighbors(x) {
            if hops[nb.vertex] == usize::MAX {
                hops[nb.vertex] = hops[x] + 1;
                queue.push_back(nb.vertex);
            }
        }
    }
    Ok(PseudoMetric {
        root,
        dist: hops.into_iter().map(|h| (h != usize::MAX).then_some(h as f64)).collect(),
        rule: EdgeLengthRule::Natural,
        convention: Convention::Half,
    })
}

/// Huang-type lengths `min{Deg(x)^{-1/2}, Deg(y)^{-1/2}}` with
/// `Deg = n / m`, designed for the full convention.
pub fn huang_lengths(g: &WeightedGraph) -> Result<EdgeLengths, MetricError> {
    for x in 0..g.n() {
        g.generalized_degree(x)?;
    }
    let deg = |x: usize| g.weighted_degree(x) / g.measure()[x];
    let values = g
        .edges()
        .iter()
        .map(|e| deg(e.u).powf(-0.5).min(deg(e.v).powf(-0.5)))
        .collect();
    Ok(EdgeLengths { rule: EdgeLengthRule::Huang, convention: Convention::Full, values })
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // reversed: BinaryHeap is a max-heap; ties go to the smaller index
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths under the given edge lengths.
pub fn path_metric(
    g: &WeightedGraph,
    lengths: &EdgeLengths,
    root: usize,
) -> Result<PseudoMetric, MetricError> {
    g.check_vertex(root)?;
    if lengths.values.len() != g.edge_count() {
        return Err(MetricError::LengthCount {
            expected: g.edge_count(),
            found: lengths.values.len(),
        });
    }
    Ok(PseudoMetric {
        root,
        dist: dijkstra(g, &lengths.values, root),
        rule: lengths.rule,
        convention: lengths.convention,
    })
}

fn dijkstra(g: &WeightedGraph, lengths: &[f64], root: usize) -> Vec<Option<f64>> {
    let mut dist = vec![f64::INFINITY; g.n()];
    let mut done = vec![false; g.n()];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(HeapEntry { dist: 0.0, vertex: root });
    while let Some(HeapEntry { dist: d, vertex: x }) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for nb in g.neighbors(x) {
            let cand = d + lengths[nb.edge];
            if cand < dist[nb.vertex] {
                dist[nb.vertex] = cand;
                heap.push(HeapEntry { dist: cand, vertex: nb.vertex });
            }
        }
    }
    dist.into_iter().map(|d| d.is_finite().then_some(d)).collect()
}

/// Metric from the given root using BFS for unit lengths, Dijkstra otherwise.
pub fn metric_from(
    g: &WeightedGraph,
    lengths: &EdgeLengths,
    root: usize,
) -> Result<PseudoMetric, MetricError> {
    if lengths.rule == EdgeLengthRule::Natural {
        natural_distance(g, root)
    } else {
        path_metric(g, lengths, root)
    }
}

/// All-pairs distances, one source per task.
pub fn pairwise_distances(
    g: &WeightedGraph,
    lengths: &EdgeLengths,
    exec: Exec,
) -> Vec<Vec<Option<f64>>> {
    exec.map_range(g.n(), |s| dijkstra(g, &lengths.values, s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptednessReport {
    pub ok: bool,
    pub worst_vertex: usize,
    /// `max_x c Σ_y b(x,y) l(x,y)² / m(x)` with `c` the convention factor.
    pub worst_ratio: f64,
    pub convention: Convention,
}

pub const ADAPTED_TOLERANCE: f64 = 1e-12;

/// Checks the adaptedness inequality vertex by vertex. Edge lengths bound
/// the path distance between neighbors from above, so passing here implies
/// the inequality for the induced path metric.
pub fn verify_adapted(
    g: &WeightedGraph,
    lengths: &EdgeLengths,
    convention: Convention,
) -> AdaptednessReport {
    let c = convention.factor();
    let (worst_vertex, worst_ratio) = (0..g.n())
        .map(|x| {
            let s: f64 =
                g.neighbors(x).iter().map(|nb| nb.weight * lengths.values[nb.edge].powi(2)).sum();
            (x, c * s / g.measure()[x])
        })
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let worst_ratio = worst_ratio.max(0.0);
    AdaptednessReport {
        ok: worst_ratio <= 1.0 + ADAPTED_TOLERANCE,
        worst_vertex,
        worst_ratio,
        convention,
    }
}

/// Extremal edge lengths. For graphs the jump measure charges exactly the
/// edges, so this range is the jump size of the path metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSize {
    pub delta_min: f64,
    pub delta_max: f64,
}

/// Jump range brought into `[δ, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpRefinement {
    /// Factor applied to all lengths (`1` unless `delta_max > 1`).
    pub scale: f64,
    pub delta: f64,
}

impl JumpSize {
    /// Rescales by `1 / delta_max` when lengths exceed 1. A growth rate
    /// measured in the original metric must be divided by `scale` to match.
    pub fn refinement(&self) -> JumpRefinement {
        if self.delta_max > 1.0 {
            let scale = 1.0 / self.delta_max;
            JumpRefinement { scale, delta: (self.delta_min * scale).min(1.0) }
        } else {
            JumpRefinement { scale: 1.0, delta: self.delta_min }
        }
    }
}

pub fn jump_size(g: &WeightedGraph, lengths: &EdgeLengths) -> Result<JumpSize, MetricError> {
    if g.edge_count() == 0 {
        return Err(MetricError::EmptyEdgeSet);
    }
    if let Some((edge, &length)) = lengths.values.iter().enumerate().find(|(_, &l)| l <= 0.0) {
        return Err(MetricError::ZeroJump { edge, length });
    }
    let (lo, hi) = lengths
        .values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l), hi.max(l)));
    Ok(JumpSize { delta_min: lo, delta_max: hi })
}
