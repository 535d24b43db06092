use super::SpectralError;
use crate::exec::Exec;
use crate::graph::WeightedGraph;

const OUTSIDE: usize = usize::MAX;

/// `L` restricted to functions vanishing outside a vertex set `Ω`.
///
/// Vectors are indexed by position in `Ω`. Neighbors outside `Ω` still
/// contribute their weight to the diagonal. An optional per-vertex exterior
/// weight adds edges to vertices that are not materialized at all, e.g. the
/// sphere beyond a truncation.
#[derive(Clone, Debug)]
pub struct DirichletOperator {
    host_n: usize,
    domain: Vec<usize>,
    measure: Vec<f64>,
    /// Diagonal of `L`: `(n(x) + exterior(x)) / m(x)`.
    diag: Vec<f64>,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    /// `b(x,y) / √(m(x) m(y))`, aligned with `cols`.
    sym: Vec<f64>,
}

impl DirichletOperator {
    pub fn new(
        g: &WeightedGraph,
        domain: &[usize],
        exterior: Option<&[f64]>,
    ) -> Result<Self, SpectralError> {
        if domain.is_empty() {
            return Err(SpectralError::EmptyDomain);
        }
        if let Some(ext) = exterior {
            if ext.len() != g.n() {
                return Err(SpectralError::LengthMismatch { expected: g.n(), found: ext.len() });
            }
        }
        let mut local = vec![OUTSIDE; g.n()];
        for (i, &x) in domain.iter().enumerate() {
            g.check_vertex(x).map_err(SpectralError::Graph)?;
            if local[x] != OUTSIDE {
                return Err(SpectralError::DuplicateDomainVertex(x));
            }
            local[x] = i;
        }
        let m = g.measure();
        let mut offsets = Vec::with_capacity(domain.len() + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        let mut sym = Vec::new();
        let mut diag = Vec::with_capacity(domain.len());
        offsets.push(0);
        for &x in domain {
            let ext = exterior.map_or(0.0, |e| e[x]);
            diag.push((g.weighted_degree(x) + ext) / m[x]);
            for nb in g.neighbors(x) {
                let j = local[nb.vertex];
                if j != OUTSIDE {
                    cols.push(j);
                    weights.push(nb.weight);
                    sym.push(nb.weight / (m[x] * m[nb.vertex]).sqrt());
                }
            }
            offsets.push(cols.len());
        }
        Ok(DirichletOperator {
            host_n: g.n(),
            domain: domain.to_vec(),
            measure: domain.iter().map(|&x| m[x]).collect(),
            diag,
            offsets,
            cols,
            weights,
            sym,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// `out = L u`.
    pub fn apply(&self, u: &[f64], out: &mut [f64], exec: Exec) {
        exec.fill(out, |i| {
            let row = self.offsets[i]..self.offsets[i + 1];
            let s: f64 = self.cols[row.clone()].iter().zip(&self.weights[row]).map(|(&j, w)| w * u[j]).sum();
            self.diag[i] * u[i] - s / self.measure[i]
        });
    }

    /// `out = M^{1/2} L M^{−1/2} v`, the symmetric form of `L`.
    pub fn apply_symmetric(&self, v: &[f64], out: &mut [f64], exec: Exec) {
        exec.fill(out, |i| {
            let row = self.offsets[i]..self.offsets[i + 1];
            let s: f64 = self.cols[row.clone()].iter().zip(&self.sym[row]).map(|(&j, w)| w * v[j]).sum();
            self.diag[i] * v[i] - s
        });
    }

    /// `⟨u, L u⟩_m`.
    pub fn quadratic_form(&self, u: &[f64], exec: Exec) -> f64 {
        let mut lu = vec![0.0; self.dim()];
        self.apply(u, &mut lu, exec);
        u.iter().zip(&lu).zip(&self.measure).map(|((a, b), m)| a * b * m).sum()
    }

    /// Upper bound on the spectrum (Gershgorin on the symmetric form).
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let off: f64 = self.sym[self.offsets[i]..self.offsets[i + 1]].iter().sum();
                self.diag[i] + off
            })
            .fold(0.0, f64::max)
    }

    /// Symmetric coordinates `v = M^{1/2} u` to `u`.
    pub fn from_symmetric(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.measure).map(|(x, m)| x / m.sqrt()).collect()
    }

    /// Extends a domain vector by zero to the host graph.
    pub fn to_host(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.host_n];
        for (&x, &v) in self.domain.iter().zip(u) {
            out[x] = v;
        }
        out
    }

    /// Dense symmetric form, row-major; intended for small domains.
    pub fn to_dense_symmetric(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.diag[i];
            for k in self.offsets[i]..self.offsets[i + 1] {
                a[i * n + self.cols[k]] -= self.sym[k];
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, GraphError};
    use crate::spectral::form::energy;

    fn weighted_p4() -> WeightedGraph {
        WeightedGraph::from_parts(
            4,
            vec![Edge::new(0, 1, 2.0), Edge::new(1, 2, 0.5), Edge::new(2, 3, 1.5)],
            vec![1.0, 3.0, 0.5, 2.0],
        )
        .unwrap()
    }

    #[test]
    fn form_matches_energy_on_domain() {
        let g = weighted_p4();
        let op = DirichletOperator::new(&g, &[1, 2], None).unwrap();
        let u = [0.7, -1.3];
        let host = op.to_host(&u);
        let q = op.quadratic_form(&u, Exec::Sequential);
        assert!((q - energy(&g, &host).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn single_vertex_is_degree_over_measure() {
        let g = weighted_p4();
        let op = DirichletOperator::new(&g, &[1], None).unwrap();
        assert_eq!(op.to_dense_symmetric(), vec![2.5 / 3.0]);
        let op = DirichletOperator::new(&g, &[1], Some(&[0.0, 0.5, 0.0, 0.0])).unwrap();
        assert_eq!(op.to_dense_symmetric(), vec![1.0]);
    }

    #[test]
    fn domain_errors() {
        let g = weighted_p4();
        assert_eq!(DirichletOperator::new(&g, &[], None).unwrap_err(), SpectralError::EmptyDomain);
        assert_eq!(
            DirichletOperator::new(&g, &[1, 1], None).unwrap_err(),
            SpectralError::DuplicateDomainVertex(1)
        );
        assert!(matches!(
            DirichletOperator::new(&g, &[7], None).unwrap_err(),
            SpectralError::Graph(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn symmetric_form_is_similar() {
        let g = weighted_p4();
        let op = DirichletOperator::new(&g, &[0, 1, 2, 3], None).unwrap();
        let u = [1.0, 2.0, -1.0, 0.5];
        let mut lu = [0.0; 4];
        op.apply(&u, &mut lu, Exec::Sequential);
        let v: Vec<f64> = u.iter().zip(op.measure()).map(|(x, m)| x * m.sqrt()).collect();
        let mut sv = [0.0; 4];
        op.apply_symmetric(&v, &mut sv, Exec::Sequential);
        let back = op.from_symmetric(&sv);
        for i in 0..4 {
            assert!((back[i] - lu[i]).abs() < 1e-13);
        }
        let a = op.to_dense_symmetric();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a[i * 4 + j], a[j * 4 + i]);
            }
        }
    }
}
