use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid setup: {0}")]
    InvalidSetup(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested quantity only exists for a rigid or trivial adjoint class.
    #[error("{0}")]
    MovingAdjoint(&'static str),

    #[error("measure infinite for this polarization")]
    InfiniteMeasure,

    #[error("prediction unsupported: {0}")]
    Unsupported(String),

    #[error("empty fiber ({0})")]
    EmptyFiber(String),

    #[error("work budget exceeded: scan needs {required} tuple tests, budget is {budget}")]
    WorkBudgetExceeded { required: u128, budget: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// Two routes that must agree did not. Always a bug.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}
