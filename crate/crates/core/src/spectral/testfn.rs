//! The exponential test functions `f_{r,x₀,α}`, `g_{r,x₀,α}` and the
//! inequalities they satisfy.

use serde::{Deserialize, Serialize};

use super::form::{energy, m_norm_sq};
use super::SpectralError;
use crate::exec::Exec;
use crate::graph::WeightedGraph;
use crate::metrics::{
    jump_size, pairwise_distances, verify_adapted, AdaptednessReport, Convention, EdgeLengths,
    PseudoMetric,
};

/// Largest admissible `α r` for the unscaled pair.
pub const EXP_ARG_CAP: f64 = 700.0;

/// Vertex count above which an all-pairs Lipschitz check falls back to edges.
pub const ALL_PAIRS_LIMIT: usize = 2000;

/// Values of `f` and `g` on every vertex, multiplied by `e^{−log_scale}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionPair {
    pub r: f64,
    pub root: usize,
    pub alpha: f64,
    /// `0` for the plain pair, `α r` for the scaled one.
    pub log_scale: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

fn check_params(r: f64, alpha: f64) -> Result<(), SpectralError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(SpectralError::BadRadius(r));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(SpectralError::BadAlpha(alpha));
    }
    Ok(())
}

/// `f = e^{αr} − 1` on `B_r`, `e^{α(2r − ρ)} − 1` on `B_{2r} \ B_r`, `0`
/// outside; `g = (f + 2) 1_{B_{2r}}`.
pub fn test_pair(metric: &PseudoMetric, r: f64, alpha: f64) -> Result<TestFunctionPair, SpectralError> {
    check_params(r, alpha)?;
    if alpha * r > EXP_ARG_CAP {
        return Err(SpectralError::Overflow { product: alpha * r, cap: EXP_ARG_CAP });
    }
    let (f, g) = metric
        .dist
        .iter()
        .map(|d| match *d {
            Some(d) if d <= r => {
                let f = (alpha * r).exp_m1();
                (f, f + 2.0)
            }
            Some(d) if d <= 2.0 * r => {
                let f = (alpha * (2.0 * r - d)).exp_m1();
                (f, f + 2.0)
            }
            _ => (0.0, 0.0),
        })
        .unzip();
    Ok(TestFunctionPair { r, root: metric.root, alpha, log_scale: 0.0, f, g })
}

/// The pair multiplied by `e^{−αr}`: all values lie in `[0, 3)`, ratios and
/// the inequalities below are unchanged, and no overflow can occur.
pub fn test_pair_scaled(
    metric: &PseudoMetric,
    r: f64,
    alpha: f64,
) -> Result<TestFunctionPair, SpectralError> {
    check_params(r, alpha)?;
    let floor = (-alpha * r).exp();
    let (f, g) = metric
        .dist
        .iter()
        .map(|d| match *d {
            Some(d) if d <= r => {
                let f = -(-alpha * r).exp_m1();
                (f, f + 2.0 * floor)
            }
            Some(d) if d <= 2.0 * r => {
                let f = (alpha * (r - d)).exp() * -(-alpha * (2.0 * r - d)).exp_m1();
                (f, f + 2.0 * floor)
            }
            _ => (0.0, 0.0),
        })
        .unzip();
    Ok(TestFunctionPair { r, root: metric.root, alpha, log_scale: alpha * r, f, g })
}

/// `c(α) = α² / 2`.
pub fn lipschitz_constant(alpha: f64) -> f64 {
    alpha * alpha / 2.0
}

/// `c(α, ρ) = (e^α − 1)² / (ρ² e^{2α} + 1)`, valid for `ρ ≤ 1`.
pub fn refined_lipschitz_constant(alpha: f64, rho: f64) -> f64 {
    (-(-alpha).exp_m1()).powi(2) / (rho * rho + (-2.0 * alpha).exp())
}

/// `c(α, δ) = (e^α − 1)² / (1 + δ² e^{2α})` for jump size in `[δ, 1]`.
pub fn refined_energy_constant(alpha: f64, delta: f64) -> f64 {
    refined_lipschitz_constant(alpha, delta)
}

fn ratio_f(alpha: f64, big_r: f64) -> f64 {
    let s = alpha * big_r;
    (-(-s).exp_m1()).powi(2) / (1.0 + (-2.0 * s).exp())
}

/// `((e^{αR} − 1)² / (e^{2αR} + 1), α² R² / 2)`; the first never exceeds the second.
pub fn lemma_elementary_first(alpha: f64, big_r: f64) -> (f64, f64) {
    (ratio_f(alpha, big_r), alpha * alpha * big_r * big_r / 2.0)
}

/// `((e^{αR} − 1)² / (e^{2αR} + 1), R² (e^α − 1)² / (R² e^{2α} + 1))` for
/// `R ∈ [0, 1]`; equal at `R = 1`.
pub fn lemma_elementary_second(alpha: f64, big_r: f64) -> (f64, f64) {
    let r2 = big_r * big_r;
    (ratio_f(alpha, big_r), r2 * (-(-alpha).exp_m1()).powi(2) / (r2 + (-2.0 * alpha).exp()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairScope {
    /// Neighbors only, with the edge length as `ρ(x, y)`.
    Edges,
    /// Every pair of vertices in one component, with exact path distances.
    AllPairs,
}

/// Lipschitz inequality `(f(x) − f(y))² ≤ c (g(x)² + g(y)²) ρ(x,y)²`.
///
/// Slack is `c ρ² − (f(x) − f(y))² / (g(x)² + g(y)²)`, which does not depend
/// on the scaling of the pair; pairs with `g(x) = g(y) = 0` are trivially fine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub ok: bool,
    pub scope: PairScope,
    pub checked: usize,
    pub worst_pair: Option<(usize, usize)>,
    pub worst_slack: f64,
    /// Pairs with `ρ ≤ 1`, checked against `c(α, ρ)`.
    pub refined_checked: usize,
    pub refined_ok: bool,
    pub refined_worst_slack: f64,
}

pub const LIPSCHITZ_TOLERANCE: f64 = -1e-12;

/// Checks the inequality over explicit `(x, y, ρ(x, y))` triples.
pub fn lipschitz_check_pairs(
    pair: &TestFunctionPair,
    pairs: &[(usize, usize, f64)],
    scope: PairScope,
) -> LipschitzReport {
    let c = lipschitz_constant(pair.alpha);
    let mut report = LipschitzReport {
        ok: true,
        scope,
        checked: 0,
        worst_pair: None,
        worst_slack: f64::INFINITY,
        refined_checked: 0,
        refined_ok: true,
        refined_worst_slack: f64::INFINITY,
    };
    for &(x, y, rho) in pairs {
        report.checked += 1;
        let mass = pair.g[x].powi(2) + pair.g[y].powi(2);
        let d = (pair.f[x] - pair.f[y]).powi(2);
        let lhs = if mass > 0.0 {
            d / mass
        } else if d > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let slack = c * rho * rho - lhs;
        if slack < report.worst_slack {
            report.worst_slack = slack;
            report.worst_pair = Some((x, y));
        }
        if rho <= 1.0 {
            report.refined_checked += 1;
            let refined = refined_lipschitz_constant(pair.alpha, rho) * rho * rho - lhs;
            report.refined_worst_slack = report.refined_worst_slack.min(refined);
        }
    }
    report.ok = report.worst_slack >= LIPSCHITZ_TOLERANCE;
    report.refined_ok = report.refined_worst_slack >= LIPSCHITZ_TOLERANCE;
    report
}

/// Lipschitz check over edges or all pairs. `AllPairs` on graphs larger
/// than [`ALL_PAIRS_LIMIT`] falls back to `Edges`.
pub fn lipschitz_check(
    g: &WeightedGraph,
    lengths: &EdgeLengths,
    pair: &TestFunctionPair,
    scope: PairScope,
    exec: Exec,
) -> Result<LipschitzReport, SpectralError> {
    if pair.f.len() != g.n() {
        return Err(SpectralError::LengthMismatch { expected: g.n(), found: pair.f.len() });
    }
    let scope = if g.n() > ALL_PAIRS_LIMIT { PairScope::Edges } else { scope };
    let triples: Vec<(usize, usize, f64)> = match scope {
        PairScope::Edges => {
            g.edges().iter().zip(&lengths.values).map(|(e, &l)| (e.u, e.v, l)).collect()
        }
        PairScope::AllPairs => {
            let dist = pairwise_distances(g, lengths, exec);
            let mut out = Vec::new();
            for (x, row) in dist.iter().enumerate() {
                for (y, d) in row.iter().enumerate().skip(x + 1) {
                    if let Some(d) = d {
                        out.push((x, y, *d));
                    }
                }
            }
            out
        }
    };
    Ok(lipschitz_check_pairs(pair, &triples, scope))
}

/// `E(f)` against `C ‖g‖²_m` with `C = α²` (half convention) or `α²/2`
/// (full), and against the jump-size refinement when all lengths are ≤ 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub ok: bool,
    pub convention: Convention,
    pub energy: f64,
    pub g_norm_sq: f64,
    pub constant: f64,
    /// `C ‖g‖² − E(f)`, on the scale of the pair.
    pub slack: f64,
    pub relative_slack: f64,
    pub delta: Option<f64>,
    pub refined_constant: Option<f64>,
    pub refined_slack: Option<f64>,
    pub refined_ok: Option<bool>,
    pub adaptedness: AdaptednessReport,
}

pub const ENERGY_TOLERANCE: f64 = -1e-9;

/// Fails with [`SpectralError::NotAdapted`] when the lengths violate the
/// adaptedness inequality for `convention`.
pub fn energy_bound_check(
    g: &WeightedGraph,
    lengths: &EdgeLengths,
    pair: &TestFunctionPair,
    convention: Convention,
) -> Result<EnergyReport, SpectralError> {
    let adaptedness = verify_adapted(g, lengths, convention);
    if !adaptedness.ok {
        return Err(SpectralError::NotAdapted {
            convention,
            worst_vertex: adaptedness.worst_vertex,
            worst_ratio: adaptedness.worst_ratio,
        });
    }
    let e = energy(g, &pair.f)?;
    let gn = m_norm_sq(g, &pair.g)?;
    let per_convention = match convention {
        Convention::Half => 2.0,
        Convention::Full => 1.0,
    };
    let constant = per_convention * lipschitz_constant(pair.alpha);
    let rhs = constant * gn;
    let slack = rhs - e;
    let relative_slack = if rhs > 0.0 { slack / rhs } else { slack };

    let jump = if g.edge_count() > 0 { jump_size(g, lengths).ok() } else { None };
    let delta = jump.filter(|j| j.delta_max <= 1.0).map(|j| j.delta_min);
    let refined_constant = delta.map(|d| per_convention * refined_energy_constant(pair.alpha, d));
    let refined_slack = refined_constant.map(|c| c * gn - e);
    let refined_ok = refined_slack.map(|s| s >= ENERGY_TOLERANCE * gn.max(1.0));

    Ok(EnergyReport {
        ok: slack >= ENERGY_TOLERANCE * rhs.max(1.0),
        convention,
        energy: e,
        g_norm_sq: gn,
        constant,
        slack,
        relative_slack,
        delta,
        refined_constant,
        refined_slack,
        refined_ok,
        adaptedness,
    })
}
