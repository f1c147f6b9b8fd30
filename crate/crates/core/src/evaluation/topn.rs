//! Held-out-reference Top-N accuracy for the citation engine.
//!
//! For each seed one reference is removed from the citation data, the seed
//! is re-scored from its remaining references, and the rank at which the
//! removed reference comes back is recorded.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::engine::{rank_profile, CitationRecommender};
use crate::ids::ArticleId;
use crate::matrix::build_citation_matrix;
use crate::similarity::{CooccurrenceModel, IndexParams, MaskedLink};

use super::EvalError;

/// Cut-offs reported in [`TopNResult::hits_at`].
pub const CUTOFFS: [usize; 3] = [1, 5, 10];

/// Which reference(s) each seed has withheld.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalPolicy {
    /// One trial per seed, withholding its smallest reference id.
    #[default]
    SmallestId,
    /// One trial per reference, rotating through all of them.
    AllReferences,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: ArticleId,
    pub removed: ArticleId,
    /// 1-based rank of the removed reference within the top `n_max`.
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopNResult {
    pub policy: RemovalPolicy,
    pub n_max: usize,
    /// Seeds with at least two references.
    pub seeds_tested: usize,
    /// Held-out trials run; equals `seeds_tested` under `smallest_id`.
    pub trials: usize,
    /// Trials whose removed reference ranked within each cut-off.
    pub hits_at: BTreeMap<usize, usize>,
    /// Seeds with fewer than two references.
    pub skipped: usize,
    #[serde(skip)]
    pub outcomes: Vec<TrialOutcome>,
}

impl TopNResult {
    pub fn hit_rate(&self, cutoff: usize) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.hits_at.get(&cutoff).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

/// Runs the protocol for `seeds` with the neighborhood settings of `engine`.
///
/// The withheld link is masked out of the co-citation data itself, not only
/// from the seed's profile, so the seed's own citation cannot leak the
/// answer back through co-citation.
pub fn leave_one_out(
    engine: &CitationRecommender,
    corpus: &Corpus,
    seeds: &[ArticleId],
    n_max: usize,
    policy: RemovalPolicy,
) -> Result<TopNResult, EvalError> {
    leave_one_out_with_params(engine.index().params(), corpus, seeds, n_max, policy)
}

pub fn leave_one_out_with_params(
    params: &IndexParams,
    corpus: &Corpus,
    seeds: &[ArticleId],
    n_max: usize,
    policy: RemovalPolicy,
) -> Result<TopNResult, EvalError> {
    if seeds.is_empty() {
        return Err(EvalError::NoSeeds);
    }
    if n_max < CUTOFFS[CUTOFFS.len() - 1] {
        return Err(EvalError::CutoffTooSmall(n_max));
    }
    if let Some(unknown) = seeds.iter().find(|seed| !corpus.contains(seed.as_str())) {
        return Err(EvalError::UnknownSeed(unknown.to_string()));
    }
    let matrix = build_citation_matrix(corpus);
    let model = CooccurrenceModel::new(&matrix);

    let per_seed: Vec<Option<Vec<TrialOutcome>>> = seeds
        .par_iter()
        .map(|seed| {
            let article = corpus.get(seed.as_str()).expect("checked above");
            if article.references.len() < 2 {
                return None;
            }
            let mut references: Vec<&ArticleId> = article.references.iter().collect();
            references.sort();
            let row = matrix.row_index(seed.as_str()).expect("citing articles are rows");
            let removed: Vec<&ArticleId> = match policy {
                RemovalPolicy::SmallestId => vec![references[0]],
                RemovalPolicy::AllReferences => references.clone(),
            };
            let outcomes = removed
                .into_iter()
                .map(|held_out| {
                    let mask = MaskedLink {
                        row,
                        col: matrix.col_index(held_out.as_str()).expect("references are columns"),
                    };
                    let profile: Vec<&ArticleId> =
                        references.iter().copied().filter(|r| *r != held_out).collect();
                    assert!(!profile.contains(&held_out), "held-out reference left in profile");
                    let mut excluded: HashSet<&str> = profile.iter().map(|id| id.as_str()).collect();
                    excluded.insert(seed.as_str());
                    let lists: Vec<Vec<(&ArticleId, f64)>> = profile
                        .iter()
                        .map(|item| {
                            let col = matrix.col_index(item.as_str()).expect("references are columns");
                            model
                                .neighbors_of(col, params, Some(mask))
                                .into_iter()
                                .map(|(other, score)| (&matrix.col_ids()[other as usize], score))
                                .collect()
                        })
                        .collect();
                    let ranked = rank_profile(lists, &excluded, n_max);
                    TrialOutcome {
                        seed: seed.clone(),
                        removed: held_out.clone(),
                        rank: ranked.iter().find(|r| &r.article == held_out).map(|r| r.rank),
                    }
                })
                .collect();
            Some(outcomes)
        })
        .collect();

    let mut result = TopNResult {
        policy,
        n_max,
        seeds_tested: 0,
        trials: 0,
        hits_at: CUTOFFS.iter().map(|&c| (c, 0)).collect(),
        skipped: 0,
        outcomes: Vec::new(),
    };
    for outcomes in per_seed {
        let Some(outcomes) = outcomes else {
            result.skipped += 1;
            continue;
        };
        result.seeds_tested += 1;
        for outcome in outcomes {
            result.trials += 1;
            if let Some(rank) = outcome.rank {
                for cutoff in CUTOFFS {
                    if rank <= cutoff {
                        *result.hits_at.get_mut(&cutoff).unwrap() += 1;
                    }
                }
            }
            result.outcomes.push(outcome);
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Article;
    use crate::similarity::Neighborhood;

    fn article(id: &str, refs: &[&str]) -> Article {
        Article {
            id: id.into(),
            title: String::new(),
            journal: "J".into(),
            year: 2000,
            references: refs.iter().map(|&r| r.into()).collect(),
            full_text: None,
        }
    }

    fn params() -> IndexParams {
        IndexParams::new(Neighborhood::All, 1).unwrap()
    }

    fn ids(values: &[&str]) -> Vec<ArticleId> {
        values.iter().map(|&v| v.into()).collect()
    }

    #[test]
    fn short_profiles_are_skipped() {
        let corpus = Corpus::from_articles(vec![
            article("a", &["x"]),
            article("b", &[]),
            article("c", &["x", "y"]),
            article("d", &["x", "y"]),
        ])
        .unwrap();
        let result =
            leave_one_out_with_params(&params(), &corpus, &ids(&["a", "b", "c"]), 10, RemovalPolicy::SmallestId).unwrap();
        assert_eq!((result.seeds_tested, result.skipped, result.trials), (1, 2, 1));
        // c withholds x; d still co-cites x with y
        assert_eq!(result.outcomes[0].removed.as_str(), "x");
        assert_eq!(result.outcomes[0].rank, Some(1));
    }

    #[test]
    fn withheld_link_does_not_leak_through_co_citation() {
        // only c cites z: once that link is hidden nothing can bring z back
        let corpus = Corpus::from_articles(vec![
            article("c", &["y", "z"]),
            article("d", &["y", "w"]),
        ])
        .unwrap();
        let seeds = ids(&["c"]);
        let result = leave_one_out_with_params(&params(), &corpus, &seeds, 10, RemovalPolicy::AllReferences).unwrap();
        let z = result.outcomes.iter().find(|o| o.removed.as_str() == "z").unwrap();
        assert_eq!(z.rank, None);
    }

    #[test]
    fn argument_errors() {
        let corpus = Corpus::from_articles(vec![article("a", &["x", "y"])]).unwrap();
        assert!(matches!(
            leave_one_out_with_params(&params(), &corpus, &[], 10, RemovalPolicy::SmallestId),
            Err(EvalError::NoSeeds)
        ));
        assert!(matches!(
            leave_one_out_with_params(&params(), &corpus, &ids(&["a"]), 5, RemovalPolicy::SmallestId),
            Err(EvalError::CutoffTooSmall(5))
        ));
        assert!(matches!(
            leave_one_out_with_params(&params(), &corpus, &ids(&["q"]), 10, RemovalPolicy::SmallestId),
            Err(EvalError::UnknownSeed(_))
        ));
    }
}
