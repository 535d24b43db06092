//! Reference computations written independently of the library code paths.
#![allow(dead_code)]

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use specgrowth::{Edge, WeightedGraph};

/// Random connected graph: random attachment tree plus extra edges.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    extra: f64,
    weights: (f64, f64),
    measure: impl Fn(&mut ChaCha8Rng, f64) -> f64,
) -> WeightedGraph {
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let w = |rng: &mut ChaCha8Rng| {
        if weights.0 < weights.1 {
            rng.gen_range(weights.0..weights.1)
        } else {
            weights.0
        }
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        seen.insert((j, i));
        edges.push(Edge::new(j, i, w(rng)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !seen.contains(&(a, b)) && rng.gen_bool(extra) {
                edges.push(Edge::new(a, b, w(rng)));
            }
        }
    }
    let mut deg = vec![0.0; n];
    for e in &edges {
        deg[e.u] += e.w;
        deg[e.v] += e.w;
    }
    let m = deg.iter().map(|&d| measure(rng, d)).collect();
    WeightedGraph::from_parts(n, edges, m).expect("valid random graph")
}

pub fn adjacency(g: &WeightedGraph) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); g.n()];
    for e in g.edges() {
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    adj
}

/// Hop distances from `root`, `usize::MAX` when unreachable.
pub fn bfs(adj: &[Vec<(usize, f64)>], root: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[root] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(x) = q.pop_front() {
        for &(y, _) in &adj[x] {
            if d[y] == usize::MAX {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

/// Unscaled test pair from distances.
pub fn pair(dist: &[f64], r: f64, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    dist.iter()
        .map(|&d| {
            if d <= r {
                let f = (alpha * r).exp() - 1.0;
                (f, f + 2.0)
            } else if d <= 2.0 * r {
                let f = (alpha * (2.0 * r - d)).exp() - 1.0;
                (f, f + 2.0)
            } else {
                (0.0, 0.0)
            }
        })
        .unzip()
}

pub fn edge_energy(g: &WeightedGraph, u: &[f64]) -> f64 {
    g.edges().iter().map(|e| e.w * (u[e.u] - u[e.v]).powi(2)).sum()
}

pub fn weighted_norm_sq(g: &WeightedGraph, u: &[f64]) -> f64 {
    u.iter().zip(g.measure()).map(|(v, m)| m * v * v).sum()
}

pub fn generalized_degrees(g: &WeightedGraph) -> Vec<f64> {
    let mut deg = vec![0.0; g.n()];
    for e in g.edges() {
        deg[e.u] += e.w;
        deg[e.v] += e.w;
    }
    deg.iter().zip(g.measure()).map(|(d, m)| d / m).collect()
}

/// Lowest eigenvalue of the symmetric Dirichlet matrix on `domain`,
/// assembled from the edge list.
pub fn dense_lowest(g: &WeightedGraph, domain: &[usize], exterior: Option<&[f64]>) -> f64 {
    let k = domain.len();
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &x) in domain.iter().enumerate() {
        pos[x] = i;
    }
    let m = g.measure();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for e in g.edges() {
        let (i, j) = (pos[e.u], pos[e.v]);
        if i != usize::MAX {
            a[(i, i)] += e.w / m[e.u];
        }
        if j != usize::MAX {
            a[(j, j)] += e.w / m[e.v];
        }
        if i != usize::MAX && j != usize::MAX {
            let off = e.w / (m[e.u] * m[e.v]).sqrt();
            a[(i, j)] -= off;
            a[(j, i)] -= off;
        }
    }
    if let Some(ext) = exterior {
        for (i, &x) in domain.iter().enumerate() {
            a[(i, i)] += ext[x] / m[x];
        }
    }
    SymmetricEigen::new(a).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Lowest eigenvalue of a symmetric tridiagonal matrix.
pub fn tridiagonal_lowest(diag: &[f64], off: &[f64]) -> f64 {
    let k = diag.len();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        a[(i, i)] = diag[i];
    }
    for (i, &o) in off.iter().enumerate() {
        a[(i, i + 1)] = o;
        a[(i + 1, i)] = o;
    }
    SymmetricEigen::new(a).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Radial reduction of the antitree with sphere sizes `s` and unit measure,
/// Dirichlet outside `B_R` where `s.len() = R + 2`.
pub fn antitree_radial_lowest(s: &[f64]) -> f64 {
    let big_r = s.len() - 2;
    let diag: Vec<f64> =
        (0..=big_r).map(|k| if k == 0 { 0.0 } else { s[k - 1] } + s[k + 1]).collect();
    let off: Vec<f64> = (0..big_r).map(|k| -(s[k] * s[k + 1]).sqrt()).collect();
    tridiagonal_lowest(&diag, &off)
}

/// Radial reduction of the spherically symmetric tree with `children[k]`
/// children per sphere-`k` vertex and measure `m[k]`, Dirichlet outside
/// `B_R` where `children.len() = R + 1`.
pub fn tree_radial_lowest(children: &[f64], m: &[f64]) -> f64 {
    let big_r = children.len() - 1;
    let diag: Vec<f64> =
        (0..=big_r).map(|k| (if k == 0 { 0.0 } else { 1.0 } + children[k]) / m[k]).collect();
    let off: Vec<f64> = (0..big_r).map(|k| -(children[k] / (m[k] * m[k + 1])).sqrt()).collect();
    tridiagonal_lowest(&diag, &off)
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn path_dirichlet(n: usize) -> f64 {
    2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos()
}
