use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("height arithmetic overflowed")]
    Overflow,
    #[error("range requested at an infinite pile")]
    CenterInfinite,
    #[error("enumeration needs {needed} items, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("window too small: need at least {needed} cells, got {got}")]
    WindowTooSmall { needed: usize, got: usize },
    #[error("pattern order mismatch: expected side {expected}, found {found:?}")]
    OrderMismatch { expected: usize, found: alloc::vec::Vec<usize> },
    #[error("column contains the forbidden pattern (a 0 below a 1)")]
    ContainsForbidden,
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("state 0 is not spreading for this cellular automaton")]
    NotSpreading,
    #[error("configuration is not bounded (it contains an infinite pile)")]
    Unbounded,
}
