use thiserror::Error;

use crate::report::Report;

/// Every failure the library can signal.
///
/// Variants marked as bug signals indicate that an internal cross-check between
/// two independent computations disagreed. They should never fire on valid input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("incomplete or malformed table: {0}")]
    TableIncomplete(String),
    #[error("ring axioms fail: {0}")]
    InvalidRing(Report),
    #[error("{what} needs {size} elements, budget is {limit} (raise GMPA_BUDGET)")]
    BudgetExceeded { what: String, size: u128, limit: u128 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("structures live over different rings: {0}")]
    AmbientMismatch(String),
    #[error("bimodule axioms fail: {0}")]
    InvalidBimodule(Report),
    #[error("associativity of block products fails: {0}")]
    AssociativityViolation(String),
    #[error("ideal family is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("set is not an ideal: {0}")]
    DomainNotIdeal(String),
    #[error("partial action is invalid: {0}")]
    InvalidAction(Report),
    #[error("partial action is not unital: {0}")]
    NotUnitalAction(String),
    #[error("component ring {0} is not unital")]
    NonUnitalComponent(usize),
    #[error("datum is invalid: {0}")]
    DatumInvalid(Report),
    #[error("element {0} is not a central idempotent")]
    NotIdempotentGenerated(String),
    #[error("global datum is invalid: {0}")]
    InvalidGlobalDatum(Report),
    #[error("ring is not symmetric for the idempotent family: {0}")]
    SymmetryFails(String),
    #[error("partial action is not regular: {0}")]
    NotRegular(String),
    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),
    #[error("groupoid is invalid: {0}")]
    InvalidGroupoid(Report),
    #[error("groupoid is not connected")]
    NotConnected,
    #[error("action is not of group type: {0}")]
    NotGroupType(String),
    #[error("groupoid action is not unital: {0}")]
    NotUnital(String),
    #[error("element is not invariant: {0}")]
    NotInvariant(String),
    #[error("search space exceeds the budget: {0}")]
    SearchSpaceExceeded(String),
    #[error("component system is invalid: {0}")]
    ComponentSystemInvalid(String),
    #[error("Galois coordinate system is invalid: {0}")]
    SystemInvalid(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Schema(String),

    // Bug signals.
    #[error("closure check failed (bug): {0}")]
    ClosureViolation(String),
    #[error("constructed action fails verification (bug): {0}")]
    TheoremCheckFailed(String),
    #[error("restricted action fails verification (bug): {0}")]
    CorollaryCheckFailed(String),
    #[error("two routes disagree (bug): {0}")]
    CoincidenceCheckFailed(String),
    #[error("blockwise and ambient computations disagree (bug): {0}")]
    BlockMismatch(String),
    #[error("equivalence check failed (bug): {0}")]
    EquivalenceFailed(String),
    #[error("projected system inconsistent (bug): {0}")]
    ProjectionInconsistent(String),
    #[error("isomorphism check failed (bug): {0}")]
    IsomorphismCheckFailed(String),
    #[error("chain broken at {stage} (bug): {witness}")]
    ChainBroken { stage: String, witness: String },
    #[error("closed form disagrees with generic construction (bug): {0}")]
    FormulaMismatch(String),
}

impl Error {
    /// True when the error means an internal cross-check failed.
    pub fn is_bug_signal(&self) -> bool {
        matches!(
            self,
            Error::ClosureViolation(_)
                | Error::TheoremCheckFailed(_)
                | Error::CorollaryCheckFailed(_)
                | Error::CoincidenceCheckFailed(_)
                | Error::BlockMismatch(_)
                | Error::EquivalenceFailed(_)
                | Error::ProjectionInconsistent(_)
                | Error::IsomorphismCheckFailed(_)
                | Error::ChainBroken { .. }
                | Error::FormulaMismatch(_)
        )
    }

    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::SearchSpaceExceeded(_)
        )
    }
}

impl Error {
    /// True when the input could not be read or parsed at all.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
