use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to the negative power {0}")]
    ZeroToNegativePower(i64),
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("invalid q = {0}: q must not be 0, 1 or -1")]
    InvalidQ(String),
    #[error("Q^y = 0 does not correspond to any exponent y")]
    ZeroPowerArgument,
    #[error("summation index l = {l} exceeds the order m = {m}")]
    IndexExceedsOrder { l: u32, m: u32 },
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("{n}! = {count} permutations exceed the budget of {budget}")]
    BudgetExceeded { n: usize, count: u128, budget: u128 },
    #[error("invalid p-adic context: {0}")]
    InvalidContext(String),
    #[error("p-adic precision exhausted")]
    PrecisionExhausted,
}
