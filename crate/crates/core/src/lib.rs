//! Volume growth and spectral bounds for weighted graph Laplacians.
//!
//! The crate works with a weighted graph `b` over a vertex measure `m` and the
//! associated Dirichlet form `E(u) = ½ Σ b(x,y) (u(x) − u(y))²`. Around it sit:
//!
//! - [`graph`] / [`family`]: the data model, validated construction, and
//!   generators for antitrees, spherically symmetric trees and the integer line;
//! - [`metrics`]: the natural hop metric, Huang-type adapted path metrics,
//!   the adaptedness check and jump sizes;
//! - [`growth`]: ball tables and finite-scale estimators of the exponential
//!   growth rates and the polynomial growth exponent;
//! - [`bounds`]: closed-form Brooks-type upper bounds on the bottom of the
//!   (essential) spectrum;
//! - [`spectral`]: quadratic form, exponential test functions and their
//!   Lipschitz/energy estimates, Dirichlet restrictions with an iterative
//!   eigensolver, exterior (annulus) brackets and supersolution checks;
//! - [`verify`]: randomized property suites used by the CLI and the tests.
//!
//! Data-parallel loops (parameter sweeps, per-center balls, sparse products)
//! run on rayon when the `parallel` feature is on; every such loop also has a
//! sequential path selected through [`Exec`].

pub mod bounds;
pub mod error;
pub mod exec;
pub mod family;
pub mod graph;
pub mod growth;
pub mod io;
pub mod metrics;
pub mod random;
pub mod spectral;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use exec::Exec;
pub use family::{FamilyKind, MeasureRule, ResourceCaps, SphereProfile, SphericallySymmetricFamily};
pub use graph::{BuildOptions, Edge, GraphError, WeightedGraph};
pub use metrics::{Convention, EdgeLengthRule, EdgeLengths, JumpSize, PseudoMetric};
