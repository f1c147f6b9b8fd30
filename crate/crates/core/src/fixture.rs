//! Synthetic corpora with topical structure.
//!
//! Each topic has its own core vocabulary; all topics share a pool of
//! generic research words. Articles cite older articles, crossing into
//! another topic with probability `cross_topic_citation`. Usage sessions
//! stay inside one topic with probability `within_topic_session` and
//! otherwise wander across topics. Downloads and citations both favour
//! popular articles, so co-occurrence is concentrated enough for item CF.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{write_usage_csv, Article, Corpus, IngestError, UsageEvent};
use crate::ids::{ActorId, ArticleId, JournalId};
use crate::semantic::is_stopword;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("invalid fixture parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureParams {
    pub topics: usize,
    pub journals_per_topic: usize,
    pub articles: usize,
    pub rng_seed: u64,
    pub cross_topic_citation: f64,
    pub within_topic_session: f64,
    /// Usage sessions generated per article.
    pub sessions_per_article: usize,
    /// Tokens of full text per article.
    pub text_length: usize,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams {
            topics: 2,
            journals_per_topic: 3,
            articles: 400,
            rng_seed: 42,
            cross_topic_citation: 0.3,
            within_topic_session: 0.9,
            sessions_per_article: 6,
            text_length: 60,
        }
    }
}

impl FixtureParams {
    fn validate(&self) -> Result<(), FixtureError> {
        let invalid = |msg: &str| Err(FixtureError::Invalid(msg.to_string()));
        if self.topics == 0 || self.journals_per_topic == 0 {
            return invalid("topics and journals_per_topic must be positive");
        }
        if self.articles < self.topics {
            return invalid("need at least one article per topic");
        }
        if !(0.0..=1.0).contains(&self.cross_topic_citation) || !(0.0..=1.0).contains(&self.within_topic_session) {
            return invalid("probabilities must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Generic words every topic uses.
const SHARED_POOL: &[&str] = &[
    "analysis", "approach", "baseline", "cohort", "data", "design", "effect", "evidence", "factor",
    "finding", "framework", "method", "measure", "model", "observed", "outcome", "procedure", "pattern",
    "protocol", "rate", "report", "result", "review", "sample", "significant", "study", "survey",
    "system", "test", "trial", "variable", "work",
];

const CORE_WORDS_PER_TOPIC: usize = 120;
const SHARED_TOKEN_SHARE: f64 = 0.35;

pub struct Fixture {
    pub params: FixtureParams,
    pub articles: Vec<Article>,
    pub usage: Vec<UsageEvent>,
}

impl Fixture {
    pub fn corpus(&self) -> Result<Corpus, IngestError> {
        Corpus::from_articles(self.articles.clone())
    }

    /// Every article id, ascending.
    pub fn seeds(&self) -> Vec<ArticleId> {
        let mut ids: Vec<ArticleId> = self.articles.iter().map(|a| a.id.clone()).collect();
        ids.sort();
        ids
    }

    /// Writes `articles.jsonl`, `usage.csv` and `seeds.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), FixtureError> {
        std::fs::create_dir_all(dir)?;
        let corpus = self.corpus()?;
        let mut articles = BufWriter::new(File::create(dir.join("articles.jsonl"))?);
        corpus.write_jsonl(&mut articles)?;
        articles.flush()?;
        write_usage_csv(&self.usage, BufWriter::new(File::create(dir.join("usage.csv"))?))?;
        let mut seeds = BufWriter::new(File::create(dir.join("seeds.txt"))?);
        for seed in self.seeds() {
            writeln!(seeds, "{seed}")?;
        }
        seeds.flush()?;
        Ok(())
    }
}

fn make_word(rng: &mut ChaCha8Rng) -> String {
    const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st", "tr", "pl"];
    const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ae", "io"];
    let syllables = rng.random_range(2..=4);
    (0..syllables)
        .map(|_| format!("{}{}", ONSETS.choose(rng).unwrap(), VOWELS.choose(rng).unwrap()))
        .collect()
}

/// Topic vocabularies, pairwise disjoint and disjoint from the shared pool.
fn vocabularies(rng: &mut ChaCha8Rng, topics: usize) -> Vec<Vec<String>> {
    let mut used: BTreeSet<String> = SHARED_POOL.iter().map(|w| w.to_string()).collect();
    (0..topics)
        .map(|_| {
            let mut words = Vec::with_capacity(CORE_WORDS_PER_TOPIC);
            while words.len() < CORE_WORDS_PER_TOPIC {
                let word = make_word(rng);
                if word.len() >= 3 && !is_stopword(&word) && used.insert(word.clone()) {
                    words.push(word);
                }
            }
            words
        })
        .collect()
}

fn popularity_weights(len: usize, exponent: f64) -> Vec<f64> {
    (0..len).map(|rank| 1.0 / ((rank + 1) as f64).powf(exponent)).collect()
}

pub fn generate(params: &FixtureParams) -> Result<Fixture, FixtureError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let vocab = vocabularies(&mut rng, params.topics);
    let width = params.articles.to_string().len().max(4);

    // Article skeletons, in chronological order.
    let mut topic_of = Vec::with_capacity(params.articles);
    let mut articles = Vec::with_capacity(params.articles);
    for i in 0..params.articles {
        // every topic appears at least once
        let topic = if i < params.topics { i } else { rng.random_range(0..params.topics) };
        let journal = rng.random_range(0..params.journals_per_topic);
        let words = &vocab[topic];
        let title: Vec<String> = (0..rng.random_range(3..=6)).map(|_| words.choose(&mut rng).unwrap().clone()).collect();
        let text: Vec<&str> = (0..params.text_length)
            .map(|_| {
                if rng.random_bool(SHARED_TOKEN_SHARE) {
                    *SHARED_POOL.choose(&mut rng).unwrap()
                } else {
                    words.choose(&mut rng).unwrap().as_str()
                }
            })
            .collect();
        topic_of.push(topic);
        articles.push(Article {
            id: ArticleId::new(format!("A{i:0width$}")).unwrap(),
            title: title.join(" "),
            journal: JournalId::new(format!("T{topic}-J{journal}")).unwrap(),
            year: 1990 + (i * 20 / params.articles.max(1)) as i32,
            references: Vec::new(),
            full_text: Some(text.join(" ")),
        });
    }

    // Citations: older targets only, preferential attachment inside the
    // chosen topic.
    let mut cited_count = vec![0usize; params.articles];
    for i in 0..params.articles {
        if rng.random_bool(0.2) {
            continue;
        }
        let wanted = rng.random_range(2..=8);
        let mut refs: BTreeSet<usize> = BTreeSet::new();
        for _ in 0..wanted * 3 {
            if refs.len() >= wanted {
                break;
            }
            let topic = if params.topics > 1 && rng.random_bool(params.cross_topic_citation) {
                let others: Vec<usize> = (0..params.topics).filter(|&t| t != topic_of[i]).collect();
                *others.choose(&mut rng).unwrap()
            } else {
                topic_of[i]
            };
            let pool: Vec<usize> = (0..i).filter(|&j| topic_of[j] == topic).collect();
            if pool.is_empty() {
                continue;
            }
            let weights: Vec<f64> = pool.iter().map(|&j| 1.0 + cited_count[j] as f64).collect();
            let pick = pool[WeightedIndex::new(&weights).unwrap().sample(&mut rng)];
            refs.insert(pick);
        }
        for &j in &refs {
            cited_count[j] += 1;
        }
        articles[i].references = refs.into_iter().map(|j| articles[j].id.clone()).collect();
    }

    // Usage: per-topic popularity ranking over a random permutation.
    let by_topic: Vec<Vec<usize>> = (0..params.topics)
        .map(|t| {
            let mut members: Vec<usize> = (0..params.articles).filter(|&j| topic_of[j] == t).collect();
            members.shuffle(&mut rng);
            members
        })
        .collect();
    let samplers: Vec<WeightedIndex<f64>> = by_topic
        .iter()
        .map(|members| WeightedIndex::new(popularity_weights(members.len(), 0.9)).unwrap())
        .collect();
    let actors = (params.articles / 4).max(1);
    let mut clocks: Vec<u64> = (0..actors).map(|_| 1_262_304_000 + rng.random_range(0..86_400)).collect();
    let mut usage = Vec::new();
    for _ in 0..params.articles * params.sessions_per_article {
        let actor = rng.random_range(0..actors);
        let home = rng.random_range(0..params.topics);
        let focused = rng.random_bool(params.within_topic_session);
        let size = rng.random_range(2..=6);
        let mut clock = clocks[actor] + rng.random_range(3_600..86_400);
        for _ in 0..size {
            let topic = if focused { home } else { rng.random_range(0..params.topics) };
            let article = by_topic[topic][samplers[topic].sample(&mut rng)];
            usage.push(UsageEvent {
                actor: ActorId::new(format!("u{actor:04}")).unwrap(),
                article: articles[article].id.clone(),
                timestamp: clock,
            });
            clock += rng.random_range(10..600);
        }
        clocks[actor] = clock;
    }

    Ok(Fixture {
        params: params.clone(),
        articles,
        usage,
    })
}
