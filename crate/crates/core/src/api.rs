//! Query views shared by the HTTP service and the command line, so both
//! emit the same JSON for the same loaded artifacts.

use serde::{Deserialize, Serialize};

use crate::artifacts::LoadedArtifacts;
use crate::engine::{Recommendation, RecommendError};
use crate::evaluation::{diversity_compare, mean_seed_similarity, Winner};
use crate::ids::{ArticleId, JournalId};
use crate::semantic::{journal_similarity, seed_to_recommendation_similarity, SemanticError};

/// Engines placed side by side by [`compare_view`], as (A, B).
pub const COMPARE_ENGINES: (&str, &str) = ("citation", "usage");

pub const DEFAULT_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    BadRequest,
    NotFound,
    NoText,
    Unavailable,
}

/// Machine-readable failure. `kind` selects the transport status and is not
/// part of the JSON body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub code: &'static str,
    pub message: String,
}

/// The body of every non-success response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(kind: ErrorKind, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { kind, code, message: message.into() }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody { code: self.code.to_string(), message: self.message.clone() }
    }

    fn unknown_seed(seed: &str) -> Self {
        ApiError::new(ErrorKind::NotFound, "unknown_seed", format!("unknown article `{seed}`"))
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

/// Parses an optional result-size parameter; absent means [`DEFAULT_N`].
pub fn parse_n(raw: Option<&str>, default: usize) -> Result<usize, ApiError> {
    let n = match raw {
        None => default,
        Some(text) => text
            .parse::<usize>()
            .map_err(|_| ApiError::new(ErrorKind::BadRequest, "bad_n", format!("n must be a positive integer, got `{text}`")))?,
    };
    check_n(n)?;
    Ok(n)
}

fn check_n(n: usize) -> Result<(), ApiError> {
    if n == 0 {
        Err(ApiError::new(ErrorKind::BadRequest, "bad_n", "n must be at least 1"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationView {
    pub article: ArticleId,
    /// `None` for ids referenced but not present in the corpus.
    pub title: Option<String>,
    pub journal: Option<JournalId>,
    pub score: f64,
    pub rank: usize,
    /// `None` when either journal lacks text or is unknown.
    pub seed_journal_similarity: Option<f64>,
}

fn decorate(artifacts: &LoadedArtifacts, seed: &str, recs: &[Recommendation]) -> Vec<RecommendationView> {
    recs.iter()
        .map(|rec| {
            let article = artifacts.corpus.get(rec.article.as_str());
            RecommendationView {
                article: rec.article.clone(),
                title: article.map(|a| a.title.clone()),
                journal: article.map(|a| a.journal.clone()),
                score: rec.score,
                rank: rec.rank,
                seed_journal_similarity: seed_to_recommendation_similarity(
                    seed,
                    rec.article.as_str(),
                    &artifacts.corpus,
                    &artifacts.vectors,
                )
                .ok(),
            }
        })
        .collect()
}

fn raw_recommend(artifacts: &LoadedArtifacts, seed: &str, engine: &str, n: usize) -> Result<Vec<Recommendation>, ApiError> {
    check_n(n)?;
    let recommender = artifacts
        .engines
        .get(engine)
        .map_err(|e| ApiError::new(ErrorKind::BadRequest, "unknown_engine", e.to_string()))?;
    recommender.recommend(seed, n).map_err(|e| match e {
        RecommendError::NotFound(_) => ApiError::unknown_seed(seed),
        RecommendError::ZeroResults => ApiError::new(ErrorKind::BadRequest, "bad_n", e.to_string()),
    })
}

pub fn recommend_view(
    artifacts: &LoadedArtifacts,
    seed: &str,
    engine: &str,
    n: usize,
) -> Result<Vec<RecommendationView>, ApiError> {
    let recs = raw_recommend(artifacts, seed, engine, n)?;
    Ok(decorate(artifacts, seed, &recs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideView {
    pub engine: String,
    pub recommendations: Vec<RecommendationView>,
    /// Mean of the defined `seed_journal_similarity` values.
    pub mean_similarity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareView {
    pub seed: ArticleId,
    pub n: usize,
    pub a: SideView,
    pub b: SideView,
    /// The more diverse engine's name, or `tie`, `zero_both`,
    /// `incomparable`; `None` unless both lists are non-empty.
    pub winner: Option<String>,
}

pub fn compare_view(artifacts: &LoadedArtifacts, seed: &str, n: usize) -> Result<CompareView, ApiError> {
    let (name_a, name_b) = COMPARE_ENGINES;
    // The comparison is over corpus articles; ids known only as references
    // have no journal to compare against.
    let seed_id = artifacts
        .corpus
        .get(seed)
        .map(|a| a.id.clone())
        .ok_or_else(|| ApiError::unknown_seed(seed))?;
    let recs_a = raw_recommend(artifacts, seed, name_a, n)?;
    let recs_b = raw_recommend(artifacts, seed, name_b, n)?;
    let side = |engine: &str, recs: &[Recommendation]| SideView {
        engine: engine.to_string(),
        recommendations: decorate(artifacts, seed, recs),
        mean_similarity: mean_seed_similarity(seed, recs, &artifacts.corpus, &artifacts.vectors),
    };
    let winner = if recs_a.is_empty() || recs_b.is_empty() {
        None
    } else {
        let verdict = diversity_compare(seed, &recs_a, &recs_b, &artifacts.vectors, &artifacts.corpus)
            .map_err(|e| ApiError::new(ErrorKind::BadRequest, "compare_failed", e.to_string()))?;
        Some(match verdict.winner {
            Winner::A => name_a.to_string(),
            Winner::B => name_b.to_string(),
            other => other.as_str().to_string(),
        })
    };
    Ok(CompareView {
        seed: seed_id,
        n,
        a: side(name_a, &recs_a),
        b: side(name_b, &recs_b),
        winner,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalSimilarityView {
    pub a: JournalId,
    pub b: JournalId,
    pub similarity: f64,
}

pub fn journal_similarity_view(artifacts: &LoadedArtifacts, a: &str, b: &str) -> Result<JournalSimilarityView, ApiError> {
    let id = |raw: &str| {
        JournalId::new(raw).ok_or_else(|| ApiError::new(ErrorKind::BadRequest, "missing_parameter", "journal ids must be non-empty"))
    };
    let (ja, jb) = (id(a)?, id(b)?);
    let similarity = journal_similarity(a, b, &artifacts.vectors).map_err(|e| match e {
        SemanticError::NoText(_) => ApiError::new(ErrorKind::NoText, "no_text", e.to_string()),
        SemanticError::UnknownJournal(_) => ApiError::new(ErrorKind::NotFound, "unknown_journal", e.to_string()),
        other => ApiError::new(ErrorKind::BadRequest, "bad_request", other.to_string()),
    })?;
    Ok(JournalSimilarityView { a: ja, b: jb, similarity })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_parsing() {
        assert_eq!(parse_n(None, 10), Ok(10));
        assert_eq!(parse_n(Some("3"), 10), Ok(3));
        for bad in ["0", "-1", "x", "2.5", ""] {
            let err = parse_n(Some(bad), 10).unwrap_err();
            assert_eq!((err.kind, err.code), (ErrorKind::BadRequest, "bad_n"));
        }
    }

    #[test]
    fn error_body_shape() {
        let err = ApiError::new(ErrorKind::NotFound, "unknown_seed", "unknown article `q`");
        assert_eq!(
            serde_json::to_string(&err.body()).unwrap(),
            r#"{"code":"unknown_seed","message":"unknown article `q`"}"#
        );
    }
}
