//! Journal-level semantic similarity from random-index term vectors.
//!
//! A journal is the concatenation of the full text of its articles. Its
//! vector is the sum of the index vectors of every token (with
//! multiplicity), L2-normalised; two journals compare by cosine. Identical
//! journals score 1.0 and journals with no shared terms score close to 0.0,
//! so lower values mean more semantically distant.

mod index_vector;
pub mod store_io;
mod tokenize;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::ids::JournalId;

pub use index_vector::{
    term_vector, IndexVector, SemanticConfig, TermVectorStore, DEFAULT_DIMENSION, DEFAULT_RNG_SEED,
    DEFAULT_SEED_ENTRIES,
};
pub use tokenize::{is_stopword, tokenize, STOPWORDS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticError {
    #[error("invalid random-index shape: dimension {dimension}, seed entries {seed_entries} (need dimension >= seeds >= 2, seeds even)")]
    InvalidConfig { dimension: usize, seed_entries: usize },
    #[error("journal `{0}` has no full text")]
    NoText(JournalId),
    #[error("unknown journal `{0}`")]
    UnknownJournal(String),
    #[error("unknown article `{0}`")]
    UnknownArticle(String),
    #[error("no journal has full text")]
    EmptyMap,
}

/// Aggregated vector of one journal.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalVector {
    pub journal: JournalId,
    /// Unit norm unless `empty`, in which case all zeros.
    pub vector: Vec<f64>,
    /// Member articles that carry full text.
    pub article_count: u64,
    pub token_count: u64,
    pub empty: bool,
}

/// Builds the vector of `journal` from its members' full text.
pub fn journal_vector(journal: &JournalId, corpus: &Corpus, store: &TermVectorStore) -> JournalVector {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut article_count = 0;
    for article in corpus.journal_articles(journal.as_str()) {
        if let Some(text) = &article.full_text {
            article_count += 1;
            for token in tokenize(text) {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
    }
    let mut vector = vector_from_counts(&counts, store);
    let token_count = counts.values().sum();
    let empty = !normalize(&mut vector);
    JournalVector {
        journal: journal.clone(),
        vector,
        article_count,
        token_count,
        empty,
    }
}

/// Unnormalised sum of `count · v(term)`. Terms are visited in sorted order,
/// so the result depends only on the multiset of tokens.
pub fn vector_from_counts(counts: &BTreeMap<String, u64>, store: &TermVectorStore) -> Vec<f64> {
    let mut dense = vec![0.0; store.config().dimension];
    for (term, &count) in counts {
        let index = store.term_vector(term);
        let weight = count as f64 * index.weight;
        for &p in &index.plus {
            dense[p as usize] += weight;
        }
        for &p in &index.minus {
            dense[p as usize] -= weight;
        }
    }
    dense
}

/// Scales to unit length; returns false (leaving zeros) for a zero vector.
fn normalize(vector: &mut [f64]) -> bool {
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        vector.iter_mut().for_each(|x| *x = 0.0);
        return false;
    }
    vector.iter_mut().for_each(|x| *x /= norm);
    true
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Vectors for every journal in a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalVectorStore {
    config: SemanticConfig,
    corpus_fingerprint: String,
    vectors: BTreeMap<JournalId, JournalVector>,
}

impl JournalVectorStore {
    pub fn build(corpus: &Corpus, config: SemanticConfig) -> Result<Self, SemanticError> {
        let store = TermVectorStore::new(config)?;
        let journals: Vec<&JournalId> = corpus.journals().collect();
        let vectors = journals
            .into_par_iter()
            .map(|journal| (journal.clone(), journal_vector(journal, corpus, &store)))
            .collect();
        Ok(JournalVectorStore {
            config,
            corpus_fingerprint: corpus.fingerprint(),
            vectors,
        })
    }

    pub(crate) fn from_parts(
        config: SemanticConfig,
        corpus_fingerprint: String,
        vectors: BTreeMap<JournalId, JournalVector>,
    ) -> Self {
        JournalVectorStore {
            config,
            corpus_fingerprint,
            vectors,
        }
    }

    pub fn config(&self) -> &SemanticConfig {
        &self.config
    }

    pub fn corpus_fingerprint(&self) -> &str {
        &self.corpus_fingerprint
    }

    pub fn get(&self, journal: &str) -> Option<&JournalVector> {
        self.vectors.get(journal)
    }

    pub fn journals(&self) -> impl Iterator<Item = &JournalVector> {
        self.vectors.values()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn text_vector(&self, journal: &str) -> Result<&JournalVector, SemanticError> {
        let vector = self
            .get(journal)
            .ok_or_else(|| SemanticError::UnknownJournal(journal.to_string()))?;
        if vector.empty {
            return Err(SemanticError::NoText(vector.journal.clone()));
        }
        Ok(vector)
    }
}

/// Cosine between two journals' vectors. A journal compared with itself is
/// exactly 1.0; a journal without full text is an error, never 0.
pub fn journal_similarity(a: &str, b: &str, vectors: &JournalVectorStore) -> Result<f64, SemanticError> {
    let left = vectors.text_vector(a)?;
    let right = vectors.text_vector(b)?;
    if a == b {
        return Ok(1.0);
    }
    Ok(dot(&left.vector, &right.vector).clamp(-1.0, 1.0))
}

/// Similarity of the journals in which `seed` and `rec` were published.
pub fn seed_to_recommendation_similarity(
    seed: &str,
    rec: &str,
    corpus: &Corpus,
    vectors: &JournalVectorStore,
) -> Result<f64, SemanticError> {
    let seed_journal = corpus
        .journal_of(seed)
        .ok_or_else(|| SemanticError::UnknownArticle(seed.to_string()))?;
    let rec_journal = corpus
        .journal_of(rec)
        .ok_or_else(|| SemanticError::UnknownArticle(rec.to_string()))?;
    journal_similarity(seed_journal.as_str(), rec_journal.as_str(), vectors)
}

/// Pairwise similarities over journals that have text, ascending by id.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalSimilarityMatrix {
    pub config: SemanticConfig,
    pub journal_ids: Vec<JournalId>,
    /// Row-major, `journal_ids.len()` squared.
    pub values: Vec<Vec<f64>>,
}

impl JournalSimilarityMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.journal_ids.iter().position(|j| j.as_str() == a)?;
        let j = self.journal_ids.iter().position(|j| j.as_str() == b)?;
        Some(self.values[i][j])
    }

    /// CSV with a leading `#` comment line recording the projection shape,
    /// then a header row and one row per journal:
    ///
    /// ```text
    /// # dimension=4096,seed_entries=16,rng_seed=42
    /// journal,J1,J2
    /// J1,1,0.83
    /// J2,0.83,1
    /// ```
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "# dimension={},seed_entries={},rng_seed={}",
            self.config.dimension, self.config.seed_entries, self.config.rng_seed
        )?;
        let mut csv = csv::Writer::from_writer(out);
        let mut header = vec!["journal".to_string()];
        header.extend(self.journal_ids.iter().map(|j| j.to_string()));
        csv.write_record(&header)?;
        for (journal, row) in self.journal_ids.iter().zip(&self.values) {
            let mut record = vec![journal.to_string()];
            record.extend(row.iter().map(|v| v.to_string()));
            csv.write_record(&record)?;
        }
        csv.flush()
    }
}

/// Full similarity matrix over non-empty journals. Each unordered pair is
/// computed once and mirrored.
pub fn export_similarity_matrix(vectors: &JournalVectorStore) -> Result<JournalSimilarityMatrix, SemanticError> {
    let members: Vec<&JournalVector> = vectors.journals().filter(|v| !v.empty).collect();
    if members.is_empty() {
        return Err(SemanticError::EmptyMap);
    }
    let n = members.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    if i == j {
                        1.0
                    } else {
                        dot(&members[i].vector, &members[j].vector).clamp(-1.0, 1.0)
                    }
                })
                .collect()
        })
        .collect();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            values[i][j] = upper[i][j - i];
            values[j][i] = upper[i][j - i];
        }
    }
    Ok(JournalSimilarityMatrix {
        config: *vectors.config(),
        journal_ids: members.iter().map(|v| v.journal.clone()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Article;

    fn article(id: &str, journal: &str, text: Option<&str>) -> Article {
        Article {
            id: id.into(),
            title: String::new(),
            journal: journal.into(),
            year: 2000,
            references: vec![],
            full_text: text.map(str::to_string),
        }
    }

    fn small_config() -> SemanticConfig {
        SemanticConfig::new(512, 8, 3).unwrap()
    }

    #[test]
    fn journal_vector_composes_term_vectors_with_multiplicity() {
        let corpus = Corpus::from_articles(vec![article("a", "J", Some("alpha alpha beta"))]).unwrap();
        let store = TermVectorStore::new(small_config()).unwrap();
        let jv = journal_vector(&"J".into(), &corpus, &store);

        let alpha = store.term_vector("alpha").to_dense(512);
        let beta = store.term_vector("beta").to_dense(512);
        let mut expected: Vec<f64> = alpha.iter().zip(&beta).map(|(a, b)| 2.0 * a + b).collect();
        let norm = expected.iter().map(|x| x * x).sum::<f64>().sqrt();
        expected.iter_mut().for_each(|x| *x /= norm);
        for (got, want) in jv.vector.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!((jv.article_count, jv.token_count, jv.empty), (1, 3, false));
    }

    #[test]
    fn journals_without_text_are_flagged_and_refused() {
        let corpus = Corpus::from_articles(vec![
            article("a", "T", Some("coronary artery")),
            article("b", "E", None),
            article("c", "S", Some("the of and")),
        ])
        .unwrap();
        let vectors = JournalVectorStore::build(&corpus, small_config()).unwrap();
        assert!(vectors.get("E").unwrap().empty);
        assert!(vectors.get("S").unwrap().empty);
        assert!(vectors.get("E").unwrap().vector.iter().all(|&x| x == 0.0));
        assert_eq!(journal_similarity("T", "E", &vectors), Err(SemanticError::NoText("E".into())));
        assert_eq!(journal_similarity("E", "E", &vectors), Err(SemanticError::NoText("E".into())));
        assert_eq!(journal_similarity("T", "T", &vectors), Ok(1.0));
        assert!(matches!(journal_similarity("T", "X", &vectors), Err(SemanticError::UnknownJournal(_))));
    }

    #[test]
    fn identical_token_multisets_give_identical_vectors() {
        let corpus = Corpus::from_articles(vec![
            article("a", "J1", Some("heart valve stent")),
            article("b", "J1", Some("stent")),
            article("c", "J2", Some("stent stent, valve")),
            article("d", "J2", Some("HEART")),
        ])
        .unwrap();
        let vectors = JournalVectorStore::build(&corpus, small_config()).unwrap();
        assert_eq!(vectors.get("J1").unwrap().vector, vectors.get("J2").unwrap().vector);
    }

    #[test]
    fn export_matches_pairwise_calls() {
        let corpus = Corpus::from_articles(vec![
            article("a", "J1", Some("myocardial infarction stent artery")),
            article("b", "J2", Some("artery plaque stent lipid")),
            article("c", "J3", Some("galaxy redshift telescope")),
            article("d", "J4", None),
        ])
        .unwrap();
        let vectors = JournalVectorStore::build(&corpus, SemanticConfig::default()).unwrap();
        let matrix = export_similarity_matrix(&vectors).unwrap();
        let ids: Vec<&str> = matrix.journal_ids.iter().map(|j| j.as_str()).collect();
        assert_eq!(ids, ["J1", "J2", "J3"]);
        for a in &ids {
            for b in &ids {
                assert_eq!(matrix.get(a, b).unwrap(), journal_similarity(a, b, &vectors).unwrap(), "{a} {b}");
                assert_eq!(matrix.get(a, b), matrix.get(b, a));
            }
        }
        assert!(matrix.get("J1", "J2").unwrap() > matrix.get("J1", "J3").unwrap());

        let mut csv = Vec::new();
        matrix.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# dimension=4096,seed_entries=16,rng_seed=42"));
        assert_eq!(lines.next(), Some("journal,J1,J2,J3"));
        assert!(lines.next().unwrap().starts_with("J1,1,"));
    }

    #[test]
    fn single_journal_and_empty_maps() {
        let one = Corpus::from_articles(vec![article("a", "J", Some("lipid"))]).unwrap();
        let matrix = export_similarity_matrix(&JournalVectorStore::build(&one, small_config()).unwrap()).unwrap();
        assert_eq!(matrix.values, vec![vec![1.0]]);

        let none = Corpus::from_articles(vec![article("a", "J", None)]).unwrap();
        let store = JournalVectorStore::build(&none, small_config()).unwrap();
        assert_eq!(export_similarity_matrix(&store), Err(SemanticError::EmptyMap));
    }

    #[test]
    fn seed_to_rec_uses_publication_journals() {
        let corpus = Corpus::from_articles(vec![
            article("s", "J1", Some("stent artery")),
            article("r1", "J1", None),
            article("r2", "J2", Some("stent plaque")),
        ])
        .unwrap();
        let vectors = JournalVectorStore::build(&corpus, small_config()).unwrap();
        assert_eq!(seed_to_recommendation_similarity("s", "r1", &corpus, &vectors), Ok(1.0));
        assert_eq!(
            seed_to_recommendation_similarity("s", "r2", &corpus, &vectors),
            journal_similarity("J1", "J2", &vectors)
        );
        assert!(matches!(
            seed_to_recommendation_similarity("s", "zz", &corpus, &vectors),
            Err(SemanticError::UnknownArticle(_))
        ));
    }
}
