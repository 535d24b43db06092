//! Seeded random connected weighted graphs for property suites and benches.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, GraphError, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureMode {
    Unit,
    /// `m(x) = n(x)`.
    WeightedDegree,
    /// Independent uniform draws in `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    pub n: usize,
    /// Probability of each non-tree pair becoming an edge.
    pub extra_edge_prob: f64,
    /// Edge weights are uniform in `[lo, hi)`; `lo == hi` gives constant weights.
    pub weight_range: (f64, f64),
    pub measure: MeasureMode,
}

impl RandomGraphSpec {
    pub fn unit(n: usize, extra_edge_prob: f64) -> Self {
        RandomGraphSpec { n, extra_edge_prob, weight_range: (1.0, 1.0), measure: MeasureMode::Unit }
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo < hi {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Random spanning tree on a shuffled vertex order plus independent extra
/// edges. Connected for every `n ≥ 1`.
pub fn random_connected(spec: &RandomGraphSpec, rng: &mut ChaCha8Rng) -> Result<WeightedGraph, GraphError> {
    let n = spec.n.max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![false; n * n];
    let mut edges = Vec::new();
    let mut add = |u: usize, v: usize, rng: &mut ChaCha8Rng, present: &mut Vec<bool>| {
        let (a, b) = (u.min(v), u.max(v));
        present[a * n + b] = true;
        edges.push(Edge::new(a, b, draw(rng, spec.weight_range)));
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        add(order[i], order[j], rng, &mut present);
    }
    for a in 0..n {
        for b in a + 1..n {
            if !present[a * n + b] && rng.gen_bool(spec.extra_edge_prob.clamp(0.0, 1.0)) {
                add(a, b, rng, &mut present);
            }
        }
    }
    let measure = match spec.measure {
        MeasureMode::Unit => vec![1.0; n],
        MeasureMode::WeightedDegree => {
            let mut deg = vec![0.0; n];
            for e in &edges {
                deg[e.u] += e.w;
                deg[e.v] += e.w;
            }
            if n == 1 {
                deg[0] = 1.0;
            }
            deg
        }
        MeasureMode::Uniform { lo, hi } => (0..n).map(|_| draw(rng, (lo, hi))).collect(),
    };
    WeightedGraph::from_parts(n, edges, measure)
}

/// Generator seeded from a single integer.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_and_reproducible() {
        for seed in 0..20 {
            let spec = RandomGraphSpec {
                n: 1 + seed as usize * 3,
                extra_edge_prob: 0.1,
                weight_range: (0.5, 2.0),
                measure: MeasureMode::WeightedDegree,
            };
            let a = random_connected(&spec, &mut rng_from_seed(seed)).unwrap();
            let b = random_connected(&spec, &mut rng_from_seed(seed)).unwrap();
            assert_eq!(a.component_count(), 1);
            assert_eq!(a.edges(), b.edges());
            for x in 0..a.n() {
                if a.n() > 1 {
                    assert!((a.measure()[x] - a.weighted_degree(x)).abs() < 1e-12);
                }
            }
        }
    }
}
