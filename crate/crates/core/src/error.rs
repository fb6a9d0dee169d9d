use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced while building distributions or evaluating measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution ended up with no items at all.
    #[error("distribution is empty")]
    EmptyDistribution,

    /// A count was zero or negative.
    #[error("count for item {item:?} must be a positive integer{}", line_suffix(.line))]
    InvalidCount { item: String, line: Option<usize> },

    /// An item had empty text.
    #[error("item text must be non-empty")]
    EmptyItem,

    /// A probability was requested for an item outside the support.
    #[error("item {item:?} is not in the support of {label:?}")]
    NotInSupport { item: String, label: String },

    /// A smoothing denominator of zero was supplied.
    #[error("smoothing denominator must be at least 1")]
    InvalidDenominator,

    /// A divergence ratio had a zero denominator. Cannot occur while
    /// smoothing is active; guards against misuse of explicit denominators.
    #[error("zero probability in denominator at item {item:?}")]
    DivisionByZero { item: String },

    /// A tokenizer configuration violated its invariants.
    #[error("invalid tokenizer config: {0}")]
    InvalidConfig(String),

    /// A count file line could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input bytes were not valid UTF-8.
    #[error("input is not valid UTF-8: {detail}")]
    Encoding { detail: String },

    /// The requested variant has no defined evaluation rule.
    #[error("variant {notation:?} is not evaluable: no evaluation rule is defined for scalar-first compositions")]
    NotEvaluable { notation: String },
}

fn line_suffix(line: &Option<usize>) -> String {
    match line {
        Some(n) => format!(" (line {n})"),
        None => String::new(),
    }
}
