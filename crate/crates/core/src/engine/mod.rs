//! Recommendation engines and the registry that selects them by name.
//!
//! Each engine kind knows how to build its similarity index from the raw
//! inputs and how to wrap a loaded index into a [`Recommender`]. Callers
//! (the CLI, the HTTP service, the evaluation harness) address engines only
//! through their registered name.

mod citation;
mod usage;

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, UsageEvent};
use crate::ids::ArticleId;
use crate::matrix::MatrixError;
use crate::similarity::{IndexParams, ItemSimilarityIndex, ParamsError, Provenance};

pub use citation::{recommend, CitationEngine, CitationRecommender};
pub use usage::{recommend_by_usage, UsageEngine, UsageRecommender};

/// One ranked result. Ranks start at 1 and scores never increase with rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub article: ArticleId,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecommendError {
    #[error("unknown article `{0}`")]
    NotFound(String),
    #[error("result size must be at least 1")]
    ZeroResults,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("unknown engine `{name}` (available: {available})")]
    UnknownEngine { name: String, available: String },
    #[error("engine `{engine}` cannot serve an index built from {provenance} data")]
    WrongProvenance { engine: String, provenance: Provenance },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A built engine answering seed-article queries.
pub trait Recommender: Send + Sync {
    /// Registered engine name.
    fn name(&self) -> &'static str;

    /// Up to `n` recommendations for `seed`. An empty list means the seed is
    /// known but nothing can be recommended for it.
    fn recommend(&self, seed: &str, n: usize) -> Result<Vec<Recommendation>, RecommendError>;
}

/// Raw inputs from which an engine kind builds its index.
#[derive(Debug, Clone, Copy)]
pub struct EngineInputs<'a> {
    pub corpus: &'a Corpus,
    pub usage: &'a [UsageEvent],
    /// Inactivity gap that closes a usage session, in seconds.
    pub window: u64,
}

/// A family of recommender that can be built and loaded by name.
pub trait EngineKind: Send + Sync {
    fn name(&self) -> &'static str;

    fn provenance(&self) -> Provenance;

    fn default_params(&self) -> IndexParams;

    fn build_index(&self, inputs: EngineInputs<'_>, params: IndexParams) -> Result<ItemSimilarityIndex, EngineError>;

    fn load(&self, index: Arc<ItemSimilarityIndex>, corpus: Arc<Corpus>) -> Result<Arc<dyn Recommender>, EngineError>;
}

static KINDS: &[&dyn EngineKind] = &[&CitationEngine, &UsageEngine];

/// All registered engine kinds, in registration order.
pub fn engine_kinds() -> &'static [&'static dyn EngineKind] {
    KINDS
}

pub fn engine_kind(name: &str) -> Result<&'static dyn EngineKind, EngineError> {
    KINDS
        .iter()
        .copied()
        .find(|kind| kind.name() == name)
        .ok_or_else(|| EngineError::UnknownEngine {
            name: name.to_string(),
            available: engine_names().join(", "),
        })
}

pub fn engine_names() -> Vec<&'static str> {
    KINDS.iter().map(|kind| kind.name()).collect()
}

/// Wraps a loaded index into the engine matching its provenance.
pub fn load_engine(index: Arc<ItemSimilarityIndex>, corpus: Arc<Corpus>) -> Result<Arc<dyn Recommender>, EngineError> {
    let kind = KINDS
        .iter()
        .find(|kind| kind.provenance() == index.provenance())
        .expect("every provenance has an engine");
    kind.load(index, corpus)
}

/// Built engines keyed by name.
#[derive(Clone, Default)]
pub struct EngineRegistry {
    engines: BTreeMap<&'static str, Arc<dyn Recommender>>,
}

impl EngineRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `engine` under its own name, replacing any previous one.
    pub fn register(&mut self, engine: Arc<dyn Recommender>) {
        self.engines.insert(engine.name(), engine);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn Recommender>, EngineError> {
        self.engines.get(name).ok_or_else(|| EngineError::UnknownEngine {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.keys().copied().collect()
    }
}

/// Sums neighbor similarities over a profile and returns the top `n`
/// candidates outside `excluded`.
///
/// `lists` must be visited in a fixed order (ascending profile id) so
/// floating-point sums, and therefore rankings, are reproducible.
pub(crate) fn rank_profile<'a, L, N>(lists: L, excluded: &HashSet<&str>, n: usize) -> Vec<Recommendation>
where
    L: IntoIterator<Item = N>,
    N: IntoIterator<Item = (&'a ArticleId, f64)>,
{
    let mut scores: BTreeMap<&ArticleId, f64> = BTreeMap::new();
    for list in lists {
        for (candidate, similarity) in list {
            if !excluded.contains(candidate.as_str()) {
                *scores.entry(candidate).or_insert(0.0) += similarity;
            }
        }
    }
    let mut ranked: Vec<(&ArticleId, f64)> = scores.into_iter().filter(|&(_, score)| score > 0.0).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(position, (article, score))| Recommendation {
            article: article.clone(),
            score,
            rank: position + 1,
        })
        .collect()
}
