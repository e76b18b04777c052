use thiserror::Error;

/// Errors shared across the crate. Every fallible operation names the
/// variant it can raise; validation problems that should be *reported*
/// rather than aborted go through [`crate::hogdm::ValidationReport`] instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range for size {size}")]
    OutOfRange { index: usize, size: usize },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("self-loop ({0}, {0}) not allowed in an undirected graph")]
    SelfLoop(usize),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("input too large: {n} exceeds the brute-force budget {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("feature width mismatch: {left} vs {right}")]
    FeatureWidthMismatch { left: usize, right: usize },

    #[error("structure kinds differ: {left} vs {right}")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("structure is empty")]
    EmptyStructure,

    #[error("unknown entity {0}")]
    UnknownEntity(String),

    #[error("unknown tuple {0:?}")]
    UnknownTuple(Vec<usize>),

    #[error("tuples have mixed lengths: {0} vs {1}")]
    MixedTupleLengths(usize, usize),

    #[error("motif too large: {n} vertices exceeds the cap {cap}")]
    MotifTooLarge { n: usize, cap: usize },

    #[error("budget exceeded: {what} = {value} exceeds {cap}")]
    BudgetExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("cycle bounds inverted: k_cycle {k_cycle} > k_ind_cycle {k_ind_cycle}")]
    BoundsInverted { k_cycle: usize, k_ind_cycle: usize },

    #[error("no entities of the requested class: {0}")]
    EmptyClass(&'static str),

    #[error("relation subset is empty")]
    EmptyRelationSet,

    #[error("unknown function kind: {0}")]
    UnknownFunctionKind(String),

    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("incidence structure is empty")]
    EmptyIncidence,

    #[error("subgraph collection is empty")]
    EmptyCollection,

    #[error("outer scheme {0} requires one subgraph anchored at every base vertex")]
    OuterRequiresVertexAnchoring(&'static str),

    #[error("model state is empty")]
    EmptyState,

    #[error("graph must be connected (lift it with an auxiliary vertex first)")]
    Disconnected,

    #[error("invalid document: {0}")]
    InvalidDocument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
