use alloc::string::String;

/// What went wrong when a model failed to define a complex structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrabilityFailure {
    /// `d ∘ d` does not vanish (the structure constants violate Jacobi).
    DSquared,
    /// `d` has a component of bidegree `(2,-1)` or `(-1,2)`, so the almost
    /// complex structure is not integrable and `d ≠ ∂ + ∂̄`.
    ComplexStructure,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed model specification: {0}")]
    MalformedSpec(String),

    #[error("model is not integrable ({failure:?}) on monomial {monomial}")]
    NotIntegrable {
        monomial: String,
        failure: IntegrabilityFailure,
    },

    #[error("malformed Beltrami family: {0}")]
    MalformedFamily(String),

    #[error("series arity mismatch: {left} vs {right} parameters")]
    ArityMismatch { left: usize, right: usize },

    #[error("forms of different total degree: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("Beltrami differential is not integrable at the sample point (residual {residual:.3e})")]
    NotIntegrableAt { residual: f64 },

    #[error("deformed coframe is degenerate (smallest singular value {smallest_singular_value:.3e})")]
    FrameDegenerate { smallest_singular_value: f64 },

    #[error("form is not closed (residual {residual:.3e})")]
    NotClosed { residual: f64 },

    #[error("form is not harmonic (residual {residual:.3e})")]
    NotHarmonic { residual: f64 },

    #[error("filtration columns are rank deficient: rank {rank} < {expected}")]
    FiltrationDegenerate { rank: usize, expected: usize },

    #[error("period frame dropped rank: rank {rank} < {expected}")]
    RankDrop { rank: usize, expected: usize },

    #[error("the model does not satisfy the ddbar-lemma")]
    DdbarRequired,

    #[error("form does not lie in F^{p}A^{k}")]
    NotInFiltration { p: usize, k: usize },
}
