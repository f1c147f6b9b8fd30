//! Offline evaluation: held-out-reference accuracy for the citation engine
//! and the side-by-side comparison of two engines.

mod comparison;
mod topn;

use thiserror::Error;

use crate::engine::RecommendError;

pub use comparison::{
    complementarity, coverage, diversity_compare, mean_seed_similarity, run_comparison, write_per_seed_csv,
    Complementarity, ComparisonOutcome, ComparisonReport, CoverageResult, DiversityVerdict, EngineSettings,
    ReportConfig, SeedRow, Winner, PER_SEED_HEADER, TIE_TOLERANCE,
};
pub use topn::{leave_one_out, leave_one_out_with_params, RemovalPolicy, TopNResult, TrialOutcome, CUTOFFS};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("seed list is empty")]
    NoSeeds,
    #[error("n_max must be at least 10, got {0}")]
    CutoffTooSmall(usize),
    #[error("unknown seed `{0}`")]
    UnknownSeed(String),
    #[error("seed `{0}`: both recommendation lists must be non-empty")]
    EmptyRecommendations(String),
    #[error("coverage results were computed over different seed sets")]
    MismatchedUniverse,
    #[error(transparent)]
    Recommend(#[from] RecommendError),
}
