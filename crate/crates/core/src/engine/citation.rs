//! Citation-based engine: every citing article is a "user" whose references
//! are its boolean ratings. A seed's references form its profile.

use std::collections::HashSet;
use std::sync::Arc;

use crate::corpus::Corpus;
use crate::ids::ArticleId;
use crate::matrix::build_citation_matrix;
use crate::similarity::{IndexMeta, IndexParams, ItemSimilarityIndex, Provenance};

use super::{rank_profile, EngineError, EngineInputs, EngineKind, RecommendError, Recommendation, Recommender};

/// Scores every candidate `j` as `Σ sim(i, j)` over the seed's references
/// `i`, excluding the seed and the references themselves.
pub fn recommend(
    seed: &str,
    n: usize,
    index: &ItemSimilarityIndex,
    corpus: &Corpus,
) -> Result<Vec<Recommendation>, RecommendError> {
    if n == 0 {
        return Err(RecommendError::ZeroResults);
    }
    let article = corpus
        .get(seed)
        .ok_or_else(|| RecommendError::NotFound(seed.to_string()))?;
    let mut profile: Vec<&ArticleId> = article.references.iter().collect();
    profile.sort();
    let mut excluded: HashSet<&str> = profile.iter().map(|id| id.as_str()).collect();
    excluded.insert(seed);
    Ok(rank_profile(
        profile.iter().map(|item| index.neighbors(item.as_str())),
        &excluded,
        n,
    ))
}

pub struct CitationRecommender {
    index: Arc<ItemSimilarityIndex>,
    corpus: Arc<Corpus>,
}

impl CitationRecommender {
    pub fn new(index: Arc<ItemSimilarityIndex>, corpus: Arc<Corpus>) -> Result<Self, EngineError> {
        if index.provenance() != Provenance::Citation {
            return Err(EngineError::WrongProvenance {
                engine: CitationEngine.name().to_string(),
                provenance: index.provenance(),
            });
        }
        Ok(CitationRecommender { index, corpus })
    }

    pub fn index(&self) -> &ItemSimilarityIndex {
        &self.index
    }
}

impl Recommender for CitationRecommender {
    fn name(&self) -> &'static str {
        CitationEngine.name()
    }

    fn recommend(&self, seed: &str, n: usize) -> Result<Vec<Recommendation>, RecommendError> {
        recommend(seed, n, &self.index, &self.corpus)
    }
}

pub struct CitationEngine;

impl EngineKind for CitationEngine {
    fn name(&self) -> &'static str {
        "citation"
    }

    fn provenance(&self) -> Provenance {
        Provenance::Citation
    }

    fn default_params(&self) -> IndexParams {
        IndexParams::citation()
    }

    fn build_index(&self, inputs: EngineInputs<'_>, params: IndexParams) -> Result<ItemSimilarityIndex, EngineError> {
        let matrix = build_citation_matrix(inputs.corpus);
        Ok(ItemSimilarityIndex::build(&matrix, Provenance::Citation, params).with_meta(IndexMeta {
            corpus_fingerprint: inputs.corpus.fingerprint(),
            window: None,
        }))
    }

    fn load(&self, index: Arc<ItemSimilarityIndex>, corpus: Arc<Corpus>) -> Result<Arc<dyn Recommender>, EngineError> {
        Ok(Arc::new(CitationRecommender::new(index, corpus)?))
    }
}
