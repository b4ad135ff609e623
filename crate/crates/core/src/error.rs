use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One of the standing hypotheses every recurrence must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// `P·Q ≠ 0`
    NonzeroPQ,
    /// `Δ = P² − 4Q ≠ 0`
    NonzeroDiscriminant,
    /// `|R0| + |R1| > 0`
    NonzeroInitialTerms,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::NonzeroPQ => f.write_str("PQ=0"),
            Hypothesis::NonzeroDiscriminant => f.write_str("Δ=0"),
            Hypothesis::NonzeroInitialTerms => f.write_str("R0=R1=0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} violates standing hypothesis")]
    Hypothesis(Hypothesis),
    #[error("parameters outside theorem scope: {0}")]
    OutOfScope(String),
    #[error("degenerate sequence: α/β is a root of unity")]
    Degenerate,
    #[error("term R_{index} is zero; lcm over this window is undefined")]
    ZeroTerm { index: u64 },
    #[error("exact division failed: {0}")]
    NotIntegral(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("interval evaluation inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
