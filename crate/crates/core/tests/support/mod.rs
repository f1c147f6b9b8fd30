//! Random interaction data and a brute-force item-CF scorer that works
//! straight from actor sets, independent of the library's matrix and
//! neighbor-list machinery.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use scholarec_core::corpus::{Article, Corpus, UsageEvent};
use scholarec_core::engine::Recommendation;

/// Item id -> ids of the actors (citing articles or sessions) linked to it.
pub type ActorSets = BTreeMap<String, BTreeSet<String>>;

/// A corpus of `articles` records citing each other and up to `external`
/// ids that have no record of their own.
pub fn citation_corpus<R: Rng>(rng: &mut R, articles: usize, external: usize, density: f64) -> Corpus {
    let ids: Vec<String> = (0..articles).map(|i| format!("a{i:02}")).collect();
    let outside: Vec<String> = (0..external).map(|i| format!("x{i:02}")).collect();
    let records = ids
        .iter()
        .enumerate()
        .map(|(i, id)| Article {
            id: id.as_str().into(),
            title: format!("Article {i}"),
            journal: format!("J{}", i % 3).as_str().into(),
            year: 2000,
            references: ids
                .iter()
                .chain(&outside)
                .filter(|&other| other != id && rng.random_bool(density))
                .map(|other| other.as_str().into())
                .collect(),
            full_text: None,
        })
        .collect();
    Corpus::from_articles(records).expect("valid corpus")
}

/// One session per actor; sessions never merge under any window.
pub fn session_events<R: Rng>(rng: &mut R, sessions: usize, items: usize, density: f64) -> Vec<UsageEvent> {
    let mut events = Vec::new();
    for s in 0..sessions {
        for i in 0..items {
            if rng.random_bool(density) {
                events.push(UsageEvent {
                    actor: format!("s{s:02}").as_str().into(),
                    article: format!("i{i:02}").as_str().into(),
                    timestamp: i as u64,
                });
            }
        }
    }
    events
}

pub fn citation_sets(corpus: &Corpus) -> ActorSets {
    let mut sets = ActorSets::new();
    for article in corpus.articles() {
        for r in &article.references {
            sets.entry(r.to_string()).or_default().insert(article.id.to_string());
        }
    }
    sets
}

pub fn session_sets(events: &[UsageEvent]) -> ActorSets {
    let mut sets = ActorSets::new();
    for e in events {
        sets.entry(e.article.to_string()).or_default().insert(e.actor.to_string());
    }
    sets
}

/// Cosine of two items' actor sets; 0 below `min_shared` common actors.
pub fn oracle_similarity(sets: &ActorSets, a: &str, b: &str, min_shared: usize) -> f64 {
    let (Some(sa), Some(sb)) = (sets.get(a), sets.get(b)) else {
        return 0.0;
    };
    let shared = sa.intersection(sb).count();
    if shared == 0 || shared < min_shared {
        return 0.0;
    }
    shared as f64 / ((sa.len() * sb.len()) as f64).sqrt()
}

/// Scores every item outside `excluded` by summed similarity to `profile`
/// (visited in ascending order), keeps positive scores, sorts by score
/// descending then id, and truncates to `n`.
pub fn oracle_recommend(
    sets: &ActorSets,
    profile: &[String],
    excluded: &BTreeSet<String>,
    n: usize,
    min_shared: usize,
) -> Vec<(String, f64)> {
    let mut profile: Vec<&String> = profile.iter().collect();
    profile.sort();
    let mut scored: Vec<(String, f64)> = sets
        .keys()
        .filter(|candidate| !excluded.contains(*candidate))
        .map(|candidate| {
            let mut score = 0.0;
            for item in &profile {
                if *item != candidate {
                    score += oracle_similarity(sets, item, candidate, min_shared);
                }
            }
            (candidate.clone(), score)
        })
        .filter(|(_, score)| *score > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(n);
    scored
}

/// Oracle result for a citation seed: profile is its references.
pub fn oracle_citation(corpus: &Corpus, sets: &ActorSets, seed: &str, n: usize) -> Vec<(String, f64)> {
    let article = corpus.get(seed).expect("seed in corpus");
    let profile: Vec<String> = article.references.iter().map(|r| r.to_string()).collect();
    let mut excluded: BTreeSet<String> = profile.iter().cloned().collect();
    excluded.insert(seed.to_string());
    oracle_recommend(sets, &profile, &excluded, n, 1)
}

/// Oracle result for a usage seed: the seed alone is the profile.
pub fn oracle_usage(sets: &ActorSets, seed: &str, n: usize, min_shared: usize) -> Vec<(String, f64)> {
    let excluded = BTreeSet::from([seed.to_string()]);
    oracle_recommend(sets, &[seed.to_string()], &excluded, n, min_shared)
}

/// Ids and ranks must agree exactly, scores within `tolerance`.
pub fn compare(got: &[Recommendation], want: &[(String, f64)], tolerance: f64) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("length {} != oracle {}", got.len(), want.len()));
    }
    for (position, (g, (id, score))) in got.iter().zip(want).enumerate() {
        if g.article.as_str() != id || g.rank != position + 1 {
            return Err(format!("rank {}: got {} (rank {}), oracle {id}", position + 1, g.article, g.rank));
        }
        if (g.score - score).abs() > tolerance {
            return Err(format!("{id}: score {} vs oracle {score}", g.score));
        }
    }
    Ok(())
}

/// |cosine| between `trials` random journal pairs whose vocabularies are
/// disjoint, each journal a random bag over its own word list.
pub fn disjoint_vocabulary_cosines<R: Rng>(
    rng: &mut R,
    trials: usize,
    config: scholarec_core::semantic::SemanticConfig,
) -> Vec<f64> {
    use scholarec_core::semantic::{vector_from_counts, TermVectorStore};
    let store = TermVectorStore::new(config).expect("valid config");
    let bag = |rng: &mut R, prefix: &str| {
        let words = rng.random_range(5..60);
        let mut counts = BTreeMap::new();
        for w in 0..words {
            counts.insert(format!("{prefix}w{w}"), rng.random_range(1..20u64));
        }
        counts
    };
    (0..trials)
        .map(|t| {
            let a = vector_from_counts(&bag(rng, &format!("t{t}a")), &store);
            let b = vector_from_counts(&bag(rng, &format!("t{t}b")), &store);
            let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            (dot / (norm(&a) * norm(&b))).abs()
        })
        .collect()
}

/// 95th percentile by nearest rank.
pub fn percentile_95(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.95 * sorted.len() as f64).ceil() as usize).max(1);
    sorted[rank - 1]
}

/// `size` articles, each citing every other one.
pub fn clique_corpus(size: usize) -> Corpus {
    let ids: Vec<String> = (0..size).map(|i| format!("c{i:02}")).collect();
    let articles = ids
        .iter()
        .map(|id| Article {
            id: id.as_str().into(),
            title: String::new(),
            journal: "J".into(),
            year: 2000,
            references: ids.iter().filter(|other| *other != id).map(|o| o.as_str().into()).collect(),
            full_text: None,
        })
        .collect();
    Corpus::from_articles(articles).expect("valid corpus")
}

/// Each seed's smallest reference (`a*`) is cited by nobody else; the
/// remaining references are shared widely.
pub fn uncited_corpus(seeds: usize) -> Corpus {
    let articles = (0..seeds)
        .map(|i| Article {
            id: format!("s{i:02}").as_str().into(),
            title: String::new(),
            journal: "J".into(),
            year: 2000,
            references: vec![format!("a{i:02}").as_str().into(), "m1".into(), "m2".into()],
            full_text: None,
        })
        .collect();
    Corpus::from_articles(articles).expect("valid corpus")
}
