//! Two-engine comparison: coverage, complementarity and journal diversity.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::engine::{RecommendError, Recommendation, Recommender};
use crate::ids::ArticleId;
use crate::semantic::{seed_to_recommendation_similarity, JournalVectorStore, SemanticConfig};
use crate::similarity::Neighborhood;

use super::EvalError;

/// Means closer than this are a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Which seeds an engine covers, and what it returned for them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageResult {
    /// Distinct seeds evaluated.
    pub universe: BTreeSet<ArticleId>,
    /// Seeds with at least one recommendation.
    pub covered: BTreeSet<ArticleId>,
    pub recommendations: BTreeMap<ArticleId, Vec<Recommendation>>,
}

impl CoverageResult {
    pub fn ratio(&self) -> f64 {
        ratio(self.covered.len(), self.universe.len())
    }

    pub fn total_recommendations(&self) -> usize {
        self.recommendations.values().map(Vec::len).sum()
    }
}

fn ratio(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Requests `n` recommendations per distinct seed. Seeds the engine does not
/// know count as uncovered.
pub fn coverage(engine: &dyn Recommender, seeds: &[ArticleId], n: usize) -> Result<CoverageResult, EvalError> {
    let universe: BTreeSet<ArticleId> = seeds.iter().cloned().collect();
    let ordered: Vec<&ArticleId> = universe.iter().collect();
    let results: Vec<(ArticleId, Vec<Recommendation>)> = ordered
        .par_iter()
        .map(|seed| match engine.recommend(seed.as_str(), n) {
            Ok(recs) => Ok(((*seed).clone(), recs)),
            Err(RecommendError::NotFound(_)) => Ok(((*seed).clone(), Vec::new())),
            Err(e) => Err(EvalError::Recommend(e)),
        })
        .collect::<Result<_, _>>()?;
    let mut covered = BTreeSet::new();
    let mut recommendations = BTreeMap::new();
    for (seed, recs) in results {
        if !recs.is_empty() {
            covered.insert(seed.clone());
        }
        recommendations.insert(seed, recs);
    }
    Ok(CoverageResult {
        universe,
        covered,
        recommendations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complementarity {
    /// Seeds covered by both engines.
    pub joint: usize,
    /// Seeds covered by at least one engine.
    pub union: usize,
    pub union_coverage: f64,
    /// (seed, article) pairs recommended by both engines on joint seeds.
    pub overlap_items: usize,
    pub joint_over_union: f64,
    /// Joint seeds over the summed covered counts of both engines.
    pub joint_over_sum: f64,
}

pub fn complementarity(a: &CoverageResult, b: &CoverageResult) -> Result<Complementarity, EvalError> {
    if a.universe != b.universe {
        return Err(EvalError::MismatchedUniverse);
    }
    let joint: BTreeSet<&ArticleId> = a.covered.intersection(&b.covered).collect();
    let union = a.covered.union(&b.covered).count();
    let overlap_items = joint
        .iter()
        .map(|seed| {
            let in_b: BTreeSet<&ArticleId> = b.recommendations[*seed].iter().map(|r| &r.article).collect();
            a.recommendations[*seed]
                .iter()
                .filter(|r| in_b.contains(&r.article))
                .count()
        })
        .sum();
    Ok(Complementarity {
        joint: joint.len(),
        union,
        union_coverage: ratio(union, a.universe.len()),
        overlap_items,
        joint_over_union: ratio(joint.len(), union),
        joint_over_sum: ratio(joint.len(), a.covered.len() + b.covered.len()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    /// Engine A's recommendations are further from the seed's journal.
    A,
    B,
    Tie,
    /// Every recommendation on both sides comes from the seed's journal.
    ZeroBoth,
    /// A side has no recommendation whose journal has text.
    Incomparable,
}

impl Winner {
    pub fn as_str(self) -> &'static str {
        match self {
            Winner::A => "a",
            Winner::B => "b",
            Winner::Tie => "tie",
            Winner::ZeroBoth => "zero_both",
            Winner::Incomparable => "incomparable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityVerdict {
    pub winner: Winner,
    pub mean_a: Option<f64>,
    pub mean_b: Option<f64>,
}

/// Mean seed-journal similarity over recommendations whose journal has text;
/// `None` when no recommendation qualifies.
pub fn mean_seed_similarity(
    seed: &str,
    recs: &[Recommendation],
    corpus: &Corpus,
    vectors: &JournalVectorStore,
) -> Option<f64> {
    let values: Vec<f64> = recs
        .iter()
        .filter_map(|r| seed_to_recommendation_similarity(seed, r.article.as_str(), corpus, vectors).ok())
        .collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Decides which list strays further from the seed's journal. Lower mean
/// similarity is more diverse.
pub fn diversity_compare(
    seed: &str,
    recs_a: &[Recommendation],
    recs_b: &[Recommendation],
    vectors: &JournalVectorStore,
    corpus: &Corpus,
) -> Result<DiversityVerdict, EvalError> {
    if recs_a.is_empty() || recs_b.is_empty() {
        return Err(EvalError::EmptyRecommendations(seed.to_string()));
    }
    let seed_journal = corpus
        .journal_of(seed)
        .ok_or_else(|| EvalError::UnknownSeed(seed.to_string()))?;
    let mean_a = mean_seed_similarity(seed, recs_a, corpus, vectors);
    let mean_b = mean_seed_similarity(seed, recs_b, corpus, vectors);
    let same_journal = |r: &Recommendation| corpus.journal_of(r.article.as_str()) == Some(seed_journal);
    let winner = if recs_a.iter().chain(recs_b).all(same_journal) {
        Winner::ZeroBoth
    } else {
        match (mean_a, mean_b) {
            (Some(a), Some(b)) if (a - b).abs() <= TIE_TOLERANCE => Winner::Tie,
            (Some(a), Some(b)) if a < b => Winner::A,
            (Some(_), Some(_)) => Winner::B,
            _ => Winner::Incomparable,
        }
    };
    Ok(DiversityVerdict { winner, mean_a, mean_b })
}

/// Index and map settings echoed into `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub n: usize,
    pub engines: BTreeMap<String, EngineSettings>,
    pub semantic: SemanticConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSettings {
    pub k: Neighborhood,
    pub min_cooccurrence: u32,
    pub window: Option<u64>,
}

/// Aggregate statistics of a two-engine run.
///
/// Mean seed similarities are averages of per-seed means over the seeds for
/// which that mean exists (`similarity_seeds_*`), and 0 when there are none.
/// `diversity_ties` includes zero-diversity seeds whose means are defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub engine_a: String,
    pub engine_b: String,
    pub seeds_total: usize,
    pub covered_a: usize,
    pub covered_b: usize,
    pub coverage_a: f64,
    pub coverage_b: f64,
    pub recs_a_total: usize,
    pub recs_b_total: usize,
    /// Share of all recommendations produced by engine A.
    pub recs_share_a: f64,
    pub joint_seeds: usize,
    pub union_seeds: usize,
    pub union_coverage: f64,
    pub joint_over_union: f64,
    pub joint_over_sum: f64,
    pub overlap_items: usize,
    pub diversity_wins_a: usize,
    pub diversity_wins_b: usize,
    pub diversity_ties: usize,
    pub zero_diversity_both: usize,
    pub diversity_incomparable: usize,
    pub similarity_seeds_a: usize,
    pub similarity_seeds_b: usize,
    pub mean_seed_similarity_a: f64,
    pub mean_seed_similarity_b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ReportConfig>,
}

/// One line of `per_seed.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRow {
    pub seed: ArticleId,
    pub covered_a: bool,
    pub covered_b: bool,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_sim_a: Option<f64>,
    pub mean_sim_b: Option<f64>,
    /// Set on joint seeds only.
    pub winner: Option<Winner>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonOutcome {
    pub report: ComparisonReport,
    pub rows: Vec<SeedRow>,
    pub coverage_a: CoverageResult,
    pub coverage_b: CoverageResult,
}

pub fn run_comparison(
    engine_a: &dyn Recommender,
    engine_b: &dyn Recommender,
    corpus: &Corpus,
    seeds: &[ArticleId],
    vectors: &JournalVectorStore,
    n: usize,
) -> Result<ComparisonOutcome, EvalError> {
    let cov_a = coverage(engine_a, seeds, n)?;
    let cov_b = coverage(engine_b, seeds, n)?;
    let comp = complementarity(&cov_a, &cov_b)?;

    let seeds_sorted: Vec<&ArticleId> = cov_a.universe.iter().collect();
    let rows: Vec<SeedRow> = seeds_sorted
        .par_iter()
        .map(|seed| {
            let recs_a = &cov_a.recommendations[*seed];
            let recs_b = &cov_b.recommendations[*seed];
            let covered_a = !recs_a.is_empty();
            let covered_b = !recs_b.is_empty();
            let (mean_sim_a, mean_sim_b, winner) = if covered_a && covered_b {
                let verdict = diversity_compare(seed.as_str(), recs_a, recs_b, vectors, corpus)?;
                (verdict.mean_a, verdict.mean_b, Some(verdict.winner))
            } else {
                (
                    mean_seed_similarity(seed.as_str(), recs_a, corpus, vectors),
                    mean_seed_similarity(seed.as_str(), recs_b, corpus, vectors),
                    None,
                )
            };
            Ok(SeedRow {
                seed: (*seed).clone(),
                covered_a,
                covered_b,
                n_a: recs_a.len(),
                n_b: recs_b.len(),
                mean_sim_a,
                mean_sim_b,
                winner,
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let report = aggregate(engine_a.name(), engine_b.name(), &rows, &cov_a, &cov_b, &comp);
    Ok(ComparisonOutcome {
        report,
        rows,
        coverage_a: cov_a,
        coverage_b: cov_b,
    })
}

fn mean_of(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let values: Vec<f64> = values.collect();
    if values.is_empty() {
        (0, 0.0)
    } else {
        (values.len(), values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn aggregate(
    name_a: &str,
    name_b: &str,
    rows: &[SeedRow],
    cov_a: &CoverageResult,
    cov_b: &CoverageResult,
    comp: &Complementarity,
) -> ComparisonReport {
    let count = |w: Winner| rows.iter().filter(|r| r.winner == Some(w)).count();
    let zero_with_means = rows
        .iter()
        .filter(|r| r.winner == Some(Winner::ZeroBoth) && r.mean_sim_a.is_some() && r.mean_sim_b.is_some())
        .count();
    let (similarity_seeds_a, mean_a) = mean_of(rows.iter().filter_map(|r| r.mean_sim_a));
    let (similarity_seeds_b, mean_b) = mean_of(rows.iter().filter_map(|r| r.mean_sim_b));
    let recs_a_total = cov_a.total_recommendations();
    let recs_b_total = cov_b.total_recommendations();
    ComparisonReport {
        engine_a: name_a.to_string(),
        engine_b: name_b.to_string(),
        seeds_total: cov_a.universe.len(),
        covered_a: cov_a.covered.len(),
        covered_b: cov_b.covered.len(),
        coverage_a: cov_a.ratio(),
        coverage_b: cov_b.ratio(),
        recs_a_total,
        recs_b_total,
        recs_share_a: ratio(recs_a_total, recs_a_total + recs_b_total),
        joint_seeds: comp.joint,
        union_seeds: comp.union,
        union_coverage: comp.union_coverage,
        joint_over_union: comp.joint_over_union,
        joint_over_sum: comp.joint_over_sum,
        overlap_items: comp.overlap_items,
        diversity_wins_a: count(Winner::A),
        diversity_wins_b: count(Winner::B),
        diversity_ties: count(Winner::Tie) + zero_with_means,
        zero_diversity_both: count(Winner::ZeroBoth),
        diversity_incomparable: count(Winner::Incomparable),
        similarity_seeds_a,
        similarity_seeds_b,
        mean_seed_similarity_a: mean_a,
        mean_seed_similarity_b: mean_b,
        config: None,
    }
}

pub const PER_SEED_HEADER: [&str; 8] = [
    "seed", "covered_a", "covered_b", "n_a", "n_b", "mean_sim_a", "mean_sim_b", "winner",
];

/// Writes `per_seed.csv`. Booleans are `0`/`1`; undefined means and
/// non-joint winners are empty cells.
pub fn write_per_seed_csv<W: Write>(rows: &[SeedRow], out: W) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(PER_SEED_HEADER)?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for row in rows {
        csv.write_record([
            row.seed.to_string(),
            u8::from(row.covered_a).to_string(),
            u8::from(row.covered_b).to_string(),
            row.n_a.to_string(),
            row.n_b.to_string(),
            opt(row.mean_sim_a),
            opt(row.mean_sim_b),
            row.winner.map(|w| w.as_str().to_string()).unwrap_or_default(),
        ])?;
    }
    csv.flush()
}
