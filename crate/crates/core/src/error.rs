use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid party dimensions: {0}")]
    InvalidDims(String),

    #[error("total dimension {total} exceeds cap {cap}")]
    CapExceeded { total: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("party structure mismatch: {0}")]
    PartyMismatch(String),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("invalid party selection: {0}")]
    InvalidParties(String),

    #[error("malformed measurement: {0}")]
    MalformedMeasurement(String),

    #[error("operator is not unitary (deviation {0})")]
    NotUnitary(f64),

    #[error("population {0} outside the relabelled subspace")]
    PopulationOutsideMap(f64),

    #[error("invalid basis map: {0}")]
    InvalidMap(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("protocol premise violated: {0}")]
    Premise(String),

    #[error("teleportation resource is not maximally entangled (fidelity with |phi+> = {0}); use merge_chain_to_ghz for non-maximal pairs")]
    NonMaximalResource(f64),

    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than a failed
    /// internal consistency check.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}
