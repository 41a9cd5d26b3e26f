use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Inputs outside the domain of an operation.
    Domain,
    /// An iterative method stopped before meeting its tolerance.
    NonConvergence,
    /// A configured size cap would be exceeded.
    ResourceCap,
    /// Malformed text input.
    Parse,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("metric signature violated at node {node}: spatial entry {value} <= 0")]
    DegenerateMetric { node: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("slab needs at least 3 time slices, got {0}")]
    TooFewTimeSlices(usize),

    #[error("G = 0 is the topological limit: {0}")]
    TopologicalLimit(&'static str),

    #[error("mu = 0: the static graviton propagator has no inverse (infinite-range limit)")]
    MasslessLimit,

    #[error("no Dirac points: need 0 < J_z < 2 J_x with J_x = J_y (got J_x = {jx}, J_y = {jy}, J_z = {jz})")]
    NoDiracPoints { jx: f64, jy: f64, jz: f64 },

    #[error("cell {cell}: {reason}")]
    Inversion { cell: usize, reason: String },

    #[error("dimension cap exceeded: {what} = {value} > {cap}")]
    DimensionCap { what: &'static str, value: usize, cap: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::NonConvergence { .. } => Category::NonConvergence,
            Error::DimensionCap { .. } => Category::ResourceCap,
            Error::Parse { .. } => Category::Parse,
            _ => Category::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
