use alloc::string::String;

/// Error type shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An enumeration or solver would exceed its configured size budget.
    #[error("capacity exceeded: cap {cap}, reached {reached}")]
    CapacityExceeded {
        /// The configured budget.
        cap: usize,
        /// How far the computation got before aborting.
        reached: usize,
    },
    /// A target vector lies outside the region reachable by positive rates.
    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),
    /// A numerical routine could not produce a trustworthy answer.
    #[error("solver failure: {0}")]
    SolverFailure(String),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Shorthand for `Error::InvalidInput` with a formatted message.
macro_rules! invalid {
    ($($arg:tt)*) => {
        crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid;
