use thiserror::Error;

/// Errors raised by the geometry, kernel and ensemble routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension {0} is not supported (expected 1..=3)")]
    UnsupportedDimension(usize),
    #[error("polytope has no vertices")]
    EmptyPolytope,
    #[error("degree bound must be at least 1, got {0}")]
    InvalidDegree(i64),
    #[error("vertex {vertex:?} has length {found}, expected {expected}")]
    DimensionMismatch {
        vertex: Vec<i64>,
        expected: usize,
        found: usize,
    },
    #[error("vertex {vertex:?} lies outside the simplex of degree {p}")]
    VertexOutsideSimplex { vertex: Vec<i64>, p: i64 },
    #[error("point lies outside the dilated simplex")]
    PointOutsideSimplex,
    #[error("polytope is contained in the boundary of the dilated simplex")]
    OnSimplexBoundary,
    #[error("polytope is not simple")]
    NotSimple,
    #[error("polytope is not full-dimensional (dim {dim} < {ambient})")]
    NotFullDimensional { dim: usize, ambient: usize },
    #[error("lattice point counts are not consistent with a polynomial of degree {degree}")]
    InconsistentCounts { degree: usize },
    #[error("lattice enumeration of {count} points exceeds the limit of {limit}")]
    EnumerationGuard { count: u128, limit: u128 },
    #[error("solver did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("point is a transition point; the requested quantity is undefined there")]
    TransitionPoint,
    #[error("finite-difference stencil straddles a region interface")]
    StencilStraddles,
    #[error("point lies in the classically allowed region")]
    AllowedRegion,
    #[error("point lies outside the region where this closed form applies")]
    OutsideOracleRegion,
    #[error("degenerate polynomial: endpoint coefficient vanishes")]
    DegeneratePolynomial,
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
    #[error("facet intersection is empty or a single point")]
    DegenerateFacet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
