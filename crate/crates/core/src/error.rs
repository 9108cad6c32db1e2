use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Resolution ran out before the requested depth; `certified_depth`
    /// entries (or levels) are still trustworthy.
    #[error("precision exhausted after {certified_depth} certified levels: {detail}")]
    Precision {
        certified_depth: usize,
        detail: String,
    },

    #[error("iterate budget exceeded: {needed} map evaluations requested, budget {budget}")]
    Budget { needed: u64, budget: u64 },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("combinatorics error: {0}")]
    Combinatorics(String),

    #[error("degenerate pair: {0}")]
    Degenerate(String),

    #[error("pair is not renormalizable: {0}")]
    NotRenormalizable(String),

    #[error("contract violated: {0}")]
    Contract(String),
}

impl Error {
    /// Errors that come from running out of numerical resolution or budget
    /// rather than from invalid input.
    pub fn is_resolution_limit(&self) -> bool {
        matches!(self, Error::Precision { .. } | Error::Budget { .. })
    }
}
