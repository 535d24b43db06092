//! Dirichlet ground energies on balls (upper bounds for `λ₀`) and annuli
//! (finite-radius brackets for `λ₀^ess`).

use serde::{Deserialize, Serialize};

use super::lanczos::{smallest, SolverOptions, TraceRow};
use super::operator::DirichletOperator;
use super::SpectralError;
use crate::family::{ResourceCaps, SphericallySymmetricFamily};
use crate::graph::WeightedGraph;
use crate::metrics::{natural_distance, PseudoMetric};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletResult {
    pub lambda: f64,
    /// `‖Lu − λu‖_m` for the `m`-normalized eigenvector.
    pub residual: f64,
    /// Matrix-vector products used.
    pub iterations: usize,
    /// Ground state on the host graph, zero outside the domain, `‖u‖_m = 1`
    /// and nonnegative sum.
    pub vector: Vec<f64>,
    pub trace: Vec<TraceRow>,
}

/// Smallest eigenvalue of `L` with Dirichlet condition outside `domain`.
///
/// `exterior` adds per-vertex weight towards vertices that are absent from
/// `g` (see [`exterior_deficit`]).
pub fn dirichlet_lowest(
    g: &WeightedGraph,
    domain: &[usize],
    exterior: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<DirichletResult, SpectralError> {
    let op = DirichletOperator::new(g, domain, exterior)?;
    let pair = smallest(&op, opts)?;
    let mut u = op.from_symmetric(&pair.vector);
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(DirichletResult {
        lambda: pair.lambda,
        residual: pair.residual,
        iterations: pair.matvecs,
        vector: op.to_host(&u),
        trace: pair.trace,
    })
}

/// Vertices with `ρ(x₀, x) ≤ r`.
pub fn ball_domain(metric: &PseudoMetric, r: f64) -> Vec<usize> {
    (0..metric.dist.len()).filter(|&x| metric.dist[x].is_some_and(|d| d <= r)).collect()
}

/// Vertices with `r_in < ρ(x₀, x) ≤ r_out`.
pub fn annulus_domain(metric: &PseudoMetric, r_in: f64, r_out: f64) -> Vec<usize> {
    (0..metric.dist.len())
        .filter(|&x| metric.dist[x].is_some_and(|d| d > r_in && d <= r_out))
        .collect()
}

/// Weight each vertex of a truncation at `radius` is missing relative to the
/// infinite family; nonzero only on the outermost sphere.
pub fn exterior_deficit(
    family: &SphericallySymmetricFamily,
    truncation: &WeightedGraph,
    radius: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; truncation.n()];
    for (r, range) in family.sphere_ranges(radius).into_iter().enumerate() {
        let full = family.vertex_degree(r);
        for x in range {
            out[x] = (full - truncation.weighted_degree(x)).max(0.0);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionRow {
    pub r: usize,
    pub vertices: usize,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn check_increasing(radii: &[usize]) -> Result<(), SpectralError> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        Err(SpectralError::RadiiNotIncreasing)
    } else {
        Ok(())
    }
}

fn row(r: usize, domain: &[usize], res: DirichletResult) -> ExhaustionRow {
    ExhaustionRow {
        r,
        vertices: domain.len(),
        lambda: res.lambda,
        residual: res.residual,
        iterations: res.iterations,
    }
}

/// `λ₀` of the Dirichlet restriction of the infinite family to each ball
/// `B_R`. The family is truncated once at the largest radius; the missing
/// outer edges enter through the exterior weight.
pub fn lambda0_exhaustion(
    family: &SphericallySymmetricFamily,
    radii: &[usize],
    opts: &SolverOptions,
    caps: &ResourceCaps,
) -> Result<Vec<ExhaustionRow>, SpectralError> {
    check_increasing(radii)?;
    let r_max = *radii.last().unwrap_or(&0);
    let g = family.truncate(r_max, caps)?;
    let deficit = exterior_deficit(family, &g, r_max);
    let ranges = family.sphere_ranges(r_max);
    radii
        .iter()
        .map(|&r| {
            let domain: Vec<usize> = (0..ranges[r].end).collect();
            let res = dirichlet_lowest(&g, &domain, Some(&deficit), opts)?;
            Ok(row(r, &domain, res))
        })
        .collect()
}

/// Ball exhaustion of a finite graph around `root` in the hop metric.
pub fn lambda0_exhaustion_graph(
    g: &WeightedGraph,
    root: usize,
    radii: &[usize],
    opts: &SolverOptions,
) -> Result<Vec<ExhaustionRow>, SpectralError> {
    check_increasing(radii)?;
    let metric = natural_distance(g, root)?;
    radii
        .iter()
        .map(|&r| {
            let domain = ball_domain(&metric, r as f64);
            let res = dirichlet_lowest(g, &domain, None, opts)?;
            Ok(row(r, &domain, res))
        })
        .collect()
}

/// Annulus ground energy; a finite-radius bracket, not a bound, for `λ₀^ess`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRow {
    pub r_in: usize,
    pub r_out: usize,
    pub vertices: usize,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Dirichlet ground energies of `{R_in < d ≤ R_out}` for each inner radius.
pub fn lambda_ess_bracket(
    family: &SphericallySymmetricFamily,
    r_in: &[usize],
    r_out: usize,
    opts: &SolverOptions,
    caps: &ResourceCaps,
) -> Result<Vec<AnnulusRow>, SpectralError> {
    if let Some(&bad) = r_in.iter().find(|&&r| r >= r_out) {
        return Err(SpectralError::EmptyAnnulus { r_in: bad, r_out });
    }
    let g = family.truncate(r_out, caps)?;
    let deficit = exterior_deficit(family, &g, r_out);
    let ranges = family.sphere_ranges(r_out);
    r_in.iter()
        .map(|&ri| {
            let domain: Vec<usize> = (ranges[ri + 1].start..ranges[r_out].end).collect();
            let res = dirichlet_lowest(&g, &domain, Some(&deficit), opts)?;
            Ok(AnnulusRow {
                r_in: ri,
                r_out,
                vertices: domain.len(),
                lambda: res.lambda,
                residual: res.residual,
                iterations: res.iterations,
            })
        })
        .collect()
}
