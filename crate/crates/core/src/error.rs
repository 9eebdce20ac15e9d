use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("group element has a block with zero determinant")]
    ZeroDeterminant,
    #[error("form is not integral in its lattice")]
    NonIntegral,
    #[error("budget exceeded: scan needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("zero polynomial or zero form")]
    ZeroPolynomial,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}
