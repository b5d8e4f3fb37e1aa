use thiserror::Error;

/// Errors raised by the local and global engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,

    #[error("generators do not close to an order; minimal entry valuation per round: {certificate:?}")]
    Unbounded { certificate: Vec<i64> },

    #[error("vertex budget exceeded: {needed} vertices requested, cap is {cap}")]
    ResourceLimit { needed: u128, cap: usize },

    #[error("flood fill exceeded the vertex cap of {cap} while {context}")]
    BudgetExceeded { cap: usize, context: String },

    #[error("intersection is infinite and matches no symbolic rule: {left} and {right}")]
    InfiniteUnsupported { left: String, right: String },

    #[error("order is not a shifted Eichler order")]
    NotShiftedEichler,

    #[error("vertex set is not a thick path: {0}")]
    Unrepresentable(String),

    #[error("shape is empty")]
    EmptyShape,

    #[error("shape is not a finite thick path")]
    NotFinite,

    #[error("eigenvalues of {0} lie in Q_p but not in Q; irrational ends are not supported")]
    IrrationalEnds(String),

    #[error("anchor pair is not in the vertex set at the requested distance")]
    AnchorInvalid,

    #[error("unsupported base field: {0}")]
    UnsupportedField(String),

    #[error("quaternion algebra is not split")]
    AlgebraNotSplit,

    #[error("suborder embeds in no order of the genus: local condition fails at {place}")]
    EmbeddingInfeasible { place: String },

    #[error("primes differ: {0} and {1}")]
    PrimeMismatch(u64, u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
