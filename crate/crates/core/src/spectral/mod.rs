//! Quadratic form, test functions, Dirichlet restrictions and eigenvalue
//! estimates.
//!
//! Conventions: the operator is `(Lu)(x) = (1/m(x)) Σ_y b(x,y)(u(x) − u(y))`
//! on `ℓ²(X, m)`; its form is `E(u) = Σ_{edges} b (u(x) − u(y))²`.

mod exhaustion;
mod form;
mod lanczos;
mod operator;
mod supersolution;
mod testfn;
mod variational;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundSet;
use crate::graph::GraphError;
use crate::metrics::{AdaptednessReport, Convention, JumpSize, MetricError};

pub use exhaustion::{
    annulus_domain, ball_domain, dirichlet_lowest, exterior_deficit, lambda0_exhaustion,
    lambda0_exhaustion_graph, lambda_ess_bracket, AnnulusRow, DirichletResult, ExhaustionRow,
};
pub use form::{energy, m_norm_sq, rayleigh};
pub use lanczos::{SolverOptions, TraceRow};
pub use operator::DirichletOperator;
pub use supersolution::{
    antitree_supersolution, supersolution_check, supersolution_residuals, SupersolutionReport,
    SUPERSOLUTION_TOLERANCE,
};
pub use testfn::{
    energy_bound_check, lemma_elementary_first, lemma_elementary_second, lipschitz_check,
    lipschitz_check_pairs, lipschitz_constant, refined_energy_constant, refined_lipschitz_constant,
    test_pair, test_pair_scaled, EnergyReport, LipschitzReport, PairScope, TestFunctionPair,
    ALL_PAIRS_LIMIT, ENERGY_TOLERANCE, EXP_ARG_CAP, LIPSCHITZ_TOLERANCE,
};
pub use variational::{
    default_alpha_grid, default_radius_grid, variational_bound, VariationalCandidate,
    VariationalResult, ALPHA_GRID_POINTS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("function has zero norm")]
    ZeroFunction,
    #[error("non-finite value at vertex {vertex}")]
    NonFinite { vertex: usize },
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("alpha·r = {product} exceeds {cap}; rescale the metric or use the scaled test pair")]
    Overflow { product: f64, cap: f64 },
    #[error(
        "lengths are not adapted under the {convention} convention: ratio {worst_ratio} at vertex {worst_vertex}"
    )]
    NotAdapted { convention: Convention, worst_vertex: usize, worst_ratio: f64 },
    #[error("Dirichlet domain is empty")]
    EmptyDomain,
    #[error("vertex {0} appears twice in the domain")]
    DuplicateDomainVertex(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(
        "eigensolver did not converge after {iterations} matrix-vector products: best λ = {lambda}, residual {residual}"
    )]
    NonConvergence { lambda: f64, residual: f64, iterations: usize },
    #[error("no (alpha, r) candidate is admissible")]
    NoAdmissibleCandidate,
    #[error("annulus {r_in} < d ≤ {r_out} is empty")]
    EmptyAnnulus { r_in: usize, r_out: usize },
    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("phi must be positive, got {value} at vertex {vertex}")]
    NonPositivePhi { vertex: usize, value: f64 },
}

/// Best variational certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalSummary {
    pub alpha: f64,
    pub r: f64,
    pub rayleigh: f64,
}

/// Aggregated spectral findings for one graph or family.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub variational: Option<VariationalSummary>,
    /// Dirichlet ground energies of balls; upper bounds for `λ₀`.
    pub exhaustion: Vec<ExhaustionRow>,
    /// Annulus ground energies; finite-radius brackets for `λ₀^ess`, not bounds.
    pub annulus: Vec<AnnulusRow>,
    pub bounds: Vec<BoundSet>,
    pub adaptedness: Option<AdaptednessReport>,
    pub jump: Option<JumpSize>,
    pub supersolution: Option<SupersolutionReport>,
}
