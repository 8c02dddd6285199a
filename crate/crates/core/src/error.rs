use thiserror::Error;

pub type Result<T> = std::result::Result<T, WalkError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("complete graph needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("marked vertex {vertex} is out of range for {n_vertices} vertices")]
    MarkedOutOfRange { vertex: usize, n_vertices: usize },

    #[error("marked vertex {0} listed more than once")]
    DuplicateMarked(usize),

    #[error("state has {got} amplitudes, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state contains non-finite amplitudes")]
    NonFinite,

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("reduced model needs 2 <= K <= N-2 and N >= 4, got N={n_vertices} K={k_marked}")]
    ReducedRange { n_vertices: usize, k_marked: usize },

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("oracle queried with a blank vertex register")]
    BlankRegister,

    #[error("ancilla registers were not restored by the conjugated oracle")]
    AncillaNotRestored,

    #[error("search needs at least two marked vertices, got {0}")]
    NoMarkedPair(usize),

    #[error("exact enumeration for K={k_marked} exceeds the limit of K={limit}")]
    EnumerationTooLarge { k_marked: usize, limit: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl WalkError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        WalkError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
