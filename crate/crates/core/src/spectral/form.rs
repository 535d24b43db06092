use super::SpectralError;
use crate::graph::WeightedGraph;

fn check(g: &WeightedGraph, u: &[f64]) -> Result<(), SpectralError> {
    if u.len() != g.n() {
        return Err(SpectralError::LengthMismatch { expected: g.n(), found: u.len() });
    }
    match u.iter().position(|v| !v.is_finite()) {
        Some(vertex) => Err(SpectralError::NonFinite { vertex }),
        None => Ok(()),
    }
}

/// `E(u) = ½ Σ_{x,y} b(x,y)(u(x) − u(y))²`, summed once per stored edge.
pub fn energy(g: &WeightedGraph, u: &[f64]) -> Result<f64, SpectralError> {
    check(g, u)?;
    Ok(g.edges().iter().map(|e| e.w * (u[e.u] - u[e.v]).powi(2)).sum())
}

/// `‖u‖²_m = Σ u(x)² m(x)`.
pub fn m_norm_sq(g: &WeightedGraph, u: &[f64]) -> Result<f64, SpectralError> {
    check(g, u)?;
    Ok(u.iter().zip(g.measure()).map(|(v, m)| v * v * m).sum())
}

/// `E(u) / ‖u‖²_m`.
pub fn rayleigh(g: &WeightedGraph, u: &[f64]) -> Result<f64, SpectralError> {
    let norm = m_norm_sq(g, u)?;
    if norm <= 0.0 {
        return Err(SpectralError::ZeroFunction);
    }
    Ok(energy(g, u)? / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn p3() -> WeightedGraph {
        WeightedGraph::from_parts(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], vec![1.0; 3])
            .unwrap()
    }

    #[test]
    fn examples() {
        let g = p3();
        assert_eq!(energy(&g, &[3.0; 3]).unwrap(), 0.0);
        assert_eq!(energy(&g, &[0.0, 1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(rayleigh(&g, &[0.0, 1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(rayleigh(&g, &[1.0; 3]).unwrap(), 0.0);
        // indicator of {0}: one cut edge
        assert_eq!(energy(&g, &[1.0, 0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        let g = p3();
        assert_eq!(rayleigh(&g, &[0.0; 3]), Err(SpectralError::ZeroFunction));
        assert!(matches!(energy(&g, &[0.0; 2]), Err(SpectralError::LengthMismatch { .. })));
        assert_eq!(energy(&g, &[0.0, f64::NAN, 0.0]), Err(SpectralError::NonFinite { vertex: 1 }));
    }
}
