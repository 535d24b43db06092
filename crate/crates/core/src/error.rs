use thiserror::Error;

use crate::bounds::BoundError;
use crate::graph::GraphError;
use crate::growth::GrowthError;
use crate::io::FormatError;
use crate::metrics::MetricError;
use crate::spectral::SpectralError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-wide error: one variant per module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    ResourceCap,
    NonConvergence,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Graph(GraphError::ResourceCap { .. }) => ErrorKind::ResourceCap,
            Error::Spectral(SpectralError::Graph(GraphError::ResourceCap { .. })) => {
                ErrorKind::ResourceCap
            }
            Error::Spectral(SpectralError::NonConvergence { .. }) => ErrorKind::NonConvergence,
            _ => ErrorKind::Validation,
        }
    }
}
