use serde::{Deserialize, Serialize};

use super::form::{energy, m_norm_sq};
use super::testfn::test_pair_scaled;
use super::SpectralError;
use crate::exec::Exec;
use crate::graph::WeightedGraph;
use crate::metrics::PseudoMetric;

pub const ALPHA_GRID_POINTS: usize = 12;

/// [`ALPHA_GRID_POINTS`] equispaced values in `(max(μ/2, 10⁻³), μ/2 + 2]`.
pub fn default_alpha_grid(mu: f64) -> Vec<f64> {
    let half = if mu.is_finite() { mu.max(0.0) / 2.0 } else { 0.0 };
    let lo = half.max(1e-3);
    let hi = half + 2.0;
    (1..=ALPHA_GRID_POINTS).map(|k| lo + (hi - lo) * k as f64 / ALPHA_GRID_POINTS as f64).collect()
}

pub const FRACTIONAL_RADII: usize = 8;

/// Integer radii `r ≥ 1` whose `B_{2r}` stays clear of the boundary; with no
/// boundary, radii up to the eccentricity of the root. When no integer
/// radius fits (short metrics), [`FRACTIONAL_RADII`] equispaced radii in
/// `(0, b/2)` with `b` the boundary distance.
pub fn default_radius_grid(g: &WeightedGraph, metric: &PseudoMetric) -> Vec<f64> {
    let bd = metric.boundary_distance(g);
    let top = match bd {
        Some(b) => ((b / 2.0).ceil() as usize).saturating_sub(1),
        None => metric.eccentricity().ceil().max(1.0) as usize,
    };
    let ints: Vec<f64> = (1..=top).map(|r| r as f64).filter(|&r| admitted(g, metric, r)).collect();
    match bd {
        Some(b) if ints.is_empty() && b > 0.0 => {
            let n = FRACTIONAL_RADII as f64;
            (1..=FRACTIONAL_RADII).map(|k| b / 2.0 * k as f64 / (n + 1.0)).collect()
        }
        _ => ints,
    }
}

fn admitted(g: &WeightedGraph, metric: &PseudoMetric, r: f64) -> bool {
    metric.boundary_distance(g).is_none_or(|b| b > 2.0 * r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalCandidate {
    pub alpha: f64,
    pub r: f64,
    /// `B_{2r}` avoids the truncation boundary.
    pub admitted: bool,
    pub rayleigh: Option<f64>,
    /// `‖g‖ / ‖f‖`.
    pub norm_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    pub alpha: f64,
    pub r: f64,
    pub rayleigh: f64,
    pub candidates: Vec<VariationalCandidate>,
}

/// Smallest Rayleigh quotient of `f_{r,x₀,α}` over the grid; an upper bound
/// for `λ₀` of every Dirichlet restriction containing `B_{2r}`.
pub fn variational_bound(
    g: &WeightedGraph,
    metric: &PseudoMetric,
    alphas: &[f64],
    radii: &[f64],
    exec: Exec,
) -> Result<VariationalResult, SpectralError> {
    let grid: Vec<(f64, f64)> =
        alphas.iter().flat_map(|&a| radii.iter().map(move |&r| (a, r))).collect();
    let evaluated = exec.map(&grid, |&(alpha, r)| -> Result<VariationalCandidate, SpectralError> {
        let mut cand =
            VariationalCandidate { alpha, r, admitted: admitted(g, metric, r), rayleigh: None, norm_ratio: None };
        if cand.admitted {
            let pair = test_pair_scaled(metric, r, alpha)?;
            let fn2 = m_norm_sq(g, &pair.f)?;
            if fn2 > 0.0 {
                cand.rayleigh = Some(energy(g, &pair.f)? / fn2);
                cand.norm_ratio = Some((m_norm_sq(g, &pair.g)? / fn2).sqrt());
            }
        }
        Ok(cand)
    });
    let candidates = evaluated.into_iter().collect::<Result<Vec<_>, _>>()?;
    let best = candidates
        .iter()
        .filter_map(|c| c.rayleigh.map(|q| (c, q)))
        .fold(None::<(&VariationalCandidate, f64)>, |acc, (c, q)| match acc {
            Some((_, bq)) if bq <= q => acc,
            _ => Some((c, q)),
        });
    match best {
        Some((c, q)) => Ok(VariationalResult { alpha: c.alpha, r: c.r, rayleigh: q, candidates: candidates.clone() }),
        None => Err(SpectralError::NoAdmissibleCandidate),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{MeasureRule, ResourceCaps, SphericallySymmetricFamily};
    use crate::graph::Edge;
    use crate::metrics::natural_distance;

    #[test]
    fn alpha_grid_shape() {
        let a = default_alpha_grid(3f64.ln());
        assert_eq!(a.len(), 12);
        assert!(a[0] > 3f64.ln() / 2.0);
        assert!((a[11] - (3f64.ln() / 2.0 + 2.0)).abs() < 1e-12);
        assert!(default_alpha_grid(0.0)[0] > 1e-3);
    }

    #[test]
    fn finite_graph_gives_zero() {
        let g = WeightedGraph::from_parts(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], vec![1.0; 3])
            .unwrap();
        let m = natural_distance(&g, 1).unwrap();
        let res = variational_bound(&g, &m, &[0.5, 1.0], &default_radius_grid(&g, &m), Exec::Sequential)
            .unwrap();
        assert_eq!(res.rayleigh, 0.0);
        assert_eq!(res.r, 1.0);
    }

    #[test]
    fn line_bound_decreases_with_scale() {
        let fam = SphericallySymmetricFamily::line(MeasureRule::Unit);
        let alphas: Vec<f64> = (1..=40).map(|k| k as f64 * 0.01).collect();
        let mut last = f64::INFINITY;
        for big_r in [21usize, 81, 321] {
            let g = fam.truncate(big_r, &ResourceCaps::default()).unwrap();
            let m = natural_distance(&g, 0).unwrap();
            let radii = default_radius_grid(&g, &m);
            assert_eq!(*radii.last().unwrap(), ((big_r - 1) / 2) as f64);
            let res = variational_bound(&g, &m, &alphas, &radii, Exec::Sequential).unwrap();
            assert!(res.rayleigh < last);
            last = res.rayleigh;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn boundary_excludes_everything() {
        let fam = SphericallySymmetricFamily::line(MeasureRule::Unit);
        let g = fam.truncate(2, &ResourceCaps::default()).unwrap();
        let m = natural_distance(&g, 0).unwrap();
        let grid = default_radius_grid(&g, &m);
        assert_eq!(grid.len(), FRACTIONAL_RADII);
        assert!(grid.iter().all(|&r| r > 0.0 && 2.0 * r < 2.0));
        assert_eq!(
            variational_bound(&g, &m, &[1.0], &[1.0], Exec::Sequential),
            Err(SpectralError::NoAdmissibleCandidate)
        );
    }
}
