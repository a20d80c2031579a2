use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("exact computation cost {cost} exceeds budget {budget}")]
    BudgetExceeded { cost: u128, budget: u128 },

    #[error("argument {value} outside the domain of T_{j}: {reason}")]
    Domain { j: u64, value: f64, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
