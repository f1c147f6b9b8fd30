//! Usage-based engine: co-downloads within sessions. The seed alone is the
//! profile, so results are the seed's own neighbor list.

use std::sync::Arc;

use crate::corpus::Corpus;
use crate::matrix::sessionize;
use crate::similarity::{IndexMeta, IndexParams, ItemSimilarityIndex, Provenance};

use super::{EngineError, EngineInputs, EngineKind, RecommendError, Recommendation, Recommender};

/// The seed's neighbors truncated to `n`. Articles never downloaded, or
/// without a neighbor above the co-occurrence floor, get an empty list;
/// ids unknown to both the corpus and the index are not found.
pub fn recommend_by_usage(
    seed: &str,
    n: usize,
    index: &ItemSimilarityIndex,
    corpus: &Corpus,
) -> Result<Vec<Recommendation>, RecommendError> {
    if n == 0 {
        return Err(RecommendError::ZeroResults);
    }
    if !corpus.contains(seed) && !index.contains(seed) {
        return Err(RecommendError::NotFound(seed.to_string()));
    }
    Ok(index
        .neighbors(seed)
        .filter(|(other, _)| other.as_str() != seed)
        .take(n)
        .enumerate()
        .map(|(position, (article, score))| Recommendation {
            article: article.clone(),
            score,
            rank: position + 1,
        })
        .collect())
}

pub struct UsageRecommender {
    index: Arc<ItemSimilarityIndex>,
    corpus: Arc<Corpus>,
}

impl UsageRecommender {
    pub fn new(index: Arc<ItemSimilarityIndex>, corpus: Arc<Corpus>) -> Result<Self, EngineError> {
        if index.provenance() != Provenance::Usage {
            return Err(EngineError::WrongProvenance {
                engine: UsageEngine.name().to_string(),
                provenance: index.provenance(),
            });
        }
        Ok(UsageRecommender { index, corpus })
    }

    pub fn index(&self) -> &ItemSimilarityIndex {
        &self.index
    }
}

impl Recommender for UsageRecommender {
    fn name(&self) -> &'static str {
        UsageEngine.name()
    }

    fn recommend(&self, seed: &str, n: usize) -> Result<Vec<Recommendation>, RecommendError> {
        recommend_by_usage(seed, n, &self.index, &self.corpus)
    }
}

pub struct UsageEngine;

impl EngineKind for UsageEngine {
    fn name(&self) -> &'static str {
        "usage"
    }

    fn provenance(&self) -> Provenance {
        Provenance::Usage
    }

    fn default_params(&self) -> IndexParams {
        IndexParams::usage()
    }

    fn build_index(&self, inputs: EngineInputs<'_>, params: IndexParams) -> Result<ItemSimilarityIndex, EngineError> {
        let sessions = sessionize(inputs.usage, inputs.window)?;
        Ok(ItemSimilarityIndex::build(&sessions, Provenance::Usage, params).with_meta(IndexMeta {
            corpus_fingerprint: inputs.corpus.fingerprint(),
            window: Some(inputs.window),
        }))
    }

    fn load(&self, index: Arc<ItemSimilarityIndex>, corpus: Arc<Corpus>) -> Result<Arc<dyn Recommender>, EngineError> {
        Ok(Arc::new(UsageRecommender::new(index, corpus)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Article;
    use crate::matrix::InteractionMatrix;
    use crate::similarity::{build_usage_index, Neighborhood};

    fn corpus(ids: &[&str]) -> Corpus {
        Corpus::from_articles(
            ids.iter()
                .map(|&id| Article {
                    id: id.into(),
                    title: String::new(),
                    journal: "J".into(),
                    year: 2000,
                    references: vec![],
                    full_text: None,
                })
                .collect(),
        )
        .unwrap()
    }

    fn index(min_cooccurrence: u32) -> ItemSimilarityIndex {
        let sessions = InteractionMatrix::from_rows(vec![
            ("s1", vec!["x".into(), "y".into()]),
            ("s2", vec!["x".into(), "y".into(), "z".into()]),
        ]);
        build_usage_index(&sessions, Neighborhood::All, min_cooccurrence).unwrap()
    }

    #[test]
    fn seed_neighbors_are_the_recommendations() {
        let corpus = corpus(&["x", "y", "z", "cold"]);
        let recs = recommend_by_usage("x", 2, &index(1), &corpus).unwrap();
        let got: Vec<(&str, usize)> = recs.iter().map(|r| (r.article.as_str(), r.rank)).collect();
        assert_eq!(got, [("y", 1), ("z", 2)]);
        assert_eq!(recs[0].score, 1.0);
        assert!((recs[1].score - 0.5f64.sqrt()).abs() < 1e-12);
        // more than available: no padding
        assert_eq!(recommend_by_usage("x", 50, &index(1), &corpus).unwrap().len(), 2);
    }

    #[test]
    fn cold_and_unknown_articles() {
        let corpus = corpus(&["x", "y", "z", "cold"]);
        assert!(recommend_by_usage("cold", 5, &index(1), &corpus).unwrap().is_empty());
        assert_eq!(
            recommend_by_usage("ghost", 5, &index(1), &corpus),
            Err(RecommendError::NotFound("ghost".into()))
        );
        assert_eq!(recommend_by_usage("x", 0, &index(1), &corpus), Err(RecommendError::ZeroResults));
    }

    #[test]
    fn floor_removes_weak_pairs() {
        let corpus = corpus(&["x", "y", "z"]);
        let recs = recommend_by_usage("x", 5, &index(2), &corpus).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recommend_by_usage("z", 5, &index(2), &corpus).unwrap().is_empty());
    }
}
