//! Error type shared by every module in the crate.

use thiserror::Error;

/// Failure modes for state construction, ensemble validation, and the
/// pointer-measurement pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A bipartite operation was requested with factor dimensions whose
    /// product differs from the total dimension.
    #[error("dimension {dim} does not factor as {left} x {right}")]
    NonFactorizableDim { dim: usize, left: usize, right: usize },

    /// An amplitude or matrix entry is NaN or infinite.
    #[error("non-finite entry at flat index {0}")]
    NonFiniteEntry(usize),

    /// Normalization was requested for a zero vector.
    #[error("state has zero norm")]
    ZeroNorm,

    /// A state that must be normalized is not.
    #[error("state is not normalized: norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),

    /// A matrix that must be Hermitian is not.
    #[error("matrix is not Hermitian: max deviation {0:.3e}")]
    NotHermitian(f64),

    /// A density matrix whose trace must be 1 has a different trace.
    #[error("trace deviates from 1 by {0:.3e}")]
    TraceNotOne(f64),

    /// A density matrix has an eigenvalue below the negativity floor.
    #[error("matrix is not positive semidefinite within tolerance")]
    NotPositive,

    /// A spectral form failed one of its structural checks.
    #[error("invalid spectral form: {0}")]
    InvalidSpectralForm(&'static str),

    /// The post-selected state is orthogonal to the evolved pre-selected
    /// state, so conditional quantities are undefined.
    #[error("post-selection is orthogonal to the pre-selected state")]
    OrthogonalPostSelection,

    /// A vector operator was built with no components or with components of
    /// unequal dimension.
    #[error("vector operator must be nonempty with components of equal dimension")]
    InvalidVectorOperator,

    /// An operator expected to act on one factor of a bipartite system does
    /// not factor that way.
    #[error("operator does not factor over the requested subsystem")]
    NotSeparable,

    /// The pointer spread must be positive and finite.
    #[error("pointer spread must be positive and finite, got {0}")]
    InvalidPointerSpread(f64),

    /// A coupling strength must be positive and finite.
    #[error("coupling strength must be positive and finite, got {0}")]
    InvalidCoupling(f64),

    /// Estimator coupling schedules need enough strictly decreasing values
    /// for an order fit and Richardson extrapolation.
    #[error("coupling schedule must hold at least {min} strictly decreasing positive values")]
    InvalidCouplingSchedule { min: usize },

    /// The strong-measurement regime requires well-separated pointer
    /// branches.
    #[error("strong regime requires g/sigma >= {min}, got {got}")]
    NotStrongRegime { min: f64, got: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
