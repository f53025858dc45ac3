use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative entry at index {index}")]
    NegativeEntry { index: usize },

    #[error("entries sum to {sum}, expected 1")]
    NotNormalized { sum: String },

    #[error("row {row} of the transition matrix is not a probability vector")]
    NotStochastic { row: usize },

    #[error("{what} out of range: {index} (allowed {min}..={max})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        min: usize,
        max: usize,
    },

    #[error("a transition law needs at least one step")]
    EmptyLaw,

    #[error("stationary distribution is not unique (rank {rank} < {states} - 1)")]
    NonUniqueStationary { rank: usize, states: usize },

    #[error("solved stationary vector has negative entry {value} at state {state}")]
    NegativeSolution { state: usize, value: String },

    #[error("zero marginal probability at state {state} (time {time})")]
    ZeroMarginal { time: usize, state: usize },

    #[error("joint matrices {index} and {} are not marginally compatible", index + 1)]
    IncompatibleSequence { index: usize },

    #[error("the credal set is empty")]
    EmptyCredalSet,

    #[error("invalid interval bounds: {0}")]
    InvalidBounds(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("problem size {required} exceeds budget {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    #[error("vertex {0} has no outgoing weight")]
    IsolatedVertex(usize),

    #[error("weight graph is not connected")]
    Disconnected,

    #[error("undirected weight matrix is not symmetric at ({0}, {1})")]
    AsymmetricWeights(usize, usize),

    #[error("stationary formula w(x)/W applies to undirected walks only")]
    DirectedUnsupported,

    #[error("all upper weights are zero")]
    DegenerateWeights,

    #[error("no grid point of the box lies on the probability simplex")]
    NoFeasibleGridPoint,

    #[error("malformed linear program: {0}")]
    MalformedProgram(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
