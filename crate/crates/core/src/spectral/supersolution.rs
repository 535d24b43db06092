use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::family::SphericallySymmetricFamily;
use crate::graph::WeightedGraph;

pub const SUPERSOLUTION_TOLERANCE: f64 = -1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionReport {
    pub ok: bool,
    pub lambda: f64,
    pub checked: usize,
    /// `min_x (Lφ − λφ)(x)` over checked vertices.
    pub min_residual: f64,
    /// `min_x (Lφ − λφ)(x) / φ(x)`.
    pub min_relative: f64,
    pub worst_vertex: Option<usize>,
}

/// `(Lφ)(x) − λ φ(x)` at every vertex, using the neighbors present in `g`.
pub fn supersolution_residuals(g: &WeightedGraph, phi: &[f64], lambda: f64) -> Vec<f64> {
    (0..g.n())
        .map(|x| {
            let s: f64 = g.neighbors(x).iter().map(|nb| nb.weight * (phi[x] - phi[nb.vertex])).sum();
            s / g.measure()[x] - lambda * phi[x]
        })
        .collect()
}

/// Checks `Lφ ≥ λφ` outside `skip` with tolerance `10⁻¹²`. A positive `φ`
/// passing on the whole graph certifies `λ₀ ≥ λ`.
pub fn supersolution_check(
    g: &WeightedGraph,
    phi: &[f64],
    lambda: f64,
    skip: &[usize],
) -> Result<SupersolutionReport, SpectralError> {
    if phi.len() != g.n() {
        return Err(SpectralError::LengthMismatch { expected: g.n(), found: phi.len() });
    }
    if let Some(vertex) = phi.iter().position(|v| !v.is_finite()) {
        return Err(SpectralError::NonFinite { vertex });
    }
    let mut skipped = vec![false; g.n()];
    for &x in skip {
        g.check_vertex(x)?;
        skipped[x] = true;
    }
    if let Some(vertex) = (0..g.n()).find(|&x| !skipped[x] && phi[x] <= 0.0) {
        return Err(SpectralError::NonPositivePhi { vertex, value: phi[vertex] });
    }
    let residuals = supersolution_residuals(g, phi, lambda);
    let mut report = SupersolutionReport {
        ok: true,
        lambda,
        checked: 0,
        min_residual: f64::INFINITY,
        min_relative: f64::INFINITY,
        worst_vertex: None,
    };
    for x in (0..g.n()).filter(|&x| !skipped[x]) {
        report.checked += 1;
        let r = residuals[x];
        if r < report.min_residual {
            report.min_residual = r;
            report.worst_vertex = Some(x);
        }
        report.min_relative = report.min_relative.min(r / phi[x]);
    }
    report.ok = report.min_residual >= SUPERSOLUTION_TOLERANCE;
    Ok(report)
}

/// `φ = 1 / s_r` on sphere `r` of a truncation; for `s_r = (r + 1)²` this is
/// `r⁻²` on sphere `r − 1`, which satisfies `Δφ = 2φ` off the root.
pub fn antitree_supersolution(family: &SphericallySymmetricFamily, radius: usize) -> Vec<f64> {
    family
        .sphere_ranges(radius)
        .into_iter()
        .enumerate()
        .flat_map(|(r, range)| std::iter::repeat_n(1.0 / family.sphere_size(r) as f64, range.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{MeasureRule, ResourceCaps, SphereProfile};
    use crate::graph::Edge;

    #[test]
    fn antitree_cubic_example() {
        let fam =
            SphericallySymmetricFamily::antitree(SphereProfile::Poly(2), MeasureRule::Unit).unwrap();
        let g = fam.truncate(12, &ResourceCaps::default()).unwrap();
        let phi = antitree_supersolution(&fam, 12);
        let res = supersolution_residuals(&g, &phi, 2.0);
        assert!((res[0] - 1.0).abs() < 1e-15);
        for (x, r) in res.iter().enumerate().skip(1) {
            if !g.is_boundary(x) {
                assert!(r.abs() <= 1e-12, "vertex {x}: {r}");
            }
        }
        let rep = supersolution_check(&g, &phi, 2.0, &g.boundary_vertices()).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.checked, g.n() - 169);
    }

    #[test]
    fn constant_phi() {
        let g = WeightedGraph::from_parts(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], vec![1.0; 3])
            .unwrap();
        let rep = supersolution_check(&g, &[1.0; 3], 0.0, &[]).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.min_residual, 0.0);
        assert!(!supersolution_check(&g, &[1.0; 3], 1.0, &[]).unwrap().ok);
        assert_eq!(
            supersolution_check(&g, &[1.0, 0.0, 1.0], 0.0, &[]),
            Err(SpectralError::NonPositivePhi { vertex: 1, value: 0.0 })
        );
        assert!(supersolution_check(&g, &[1.0, 0.0, 1.0], 0.0, &[1]).is_ok());
    }
}
