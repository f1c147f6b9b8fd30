//! Article records, the journal registry and usage events, plus their
//! line-oriented file formats.
//!
//! Articles are read from UTF-8 JSON lines:
//!
//! ```text
//! {"id":"A1","title":"...","journal":"J1","year":2004,"references":["A0"],"full_text":"..."}
//! ```
//!
//! Usage events are read from a CSV file with the header
//! `actor,article,timestamp`, where `timestamp` is a non-negative integer
//! number of seconds since the epoch.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ids::{ActorId, ArticleId, JournalId};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate article id `{id}`")]
    DuplicateArticle { line: usize, id: ArticleId },
    #[error("line {line}: article `{id}` cites itself")]
    SelfCitation { line: usize, id: ArticleId },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A bibliographic record. Its `references` act as the article's boolean
/// "ratings" when the article is treated as a user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub id: ArticleId,
    pub title: String,
    pub journal: JournalId,
    pub year: i32,
    pub references: Vec<ArticleId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_text: Option<String>,
}

/// Wire shape of one article line, validated into an [`Article`].
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArticleRecord {
    id: String,
    title: String,
    journal: String,
    year: i32,
    references: Vec<String>,
    #[serde(default)]
    full_text: Option<String>,
}

impl ArticleRecord {
    fn validate(self, line: usize) -> Result<Article, IngestError> {
        let malformed = |message: &str| IngestError::Malformed {
            line,
            message: message.to_string(),
        };
        let id = ArticleId::new(self.id).ok_or_else(|| malformed("empty `id`"))?;
        let journal = JournalId::new(self.journal).ok_or_else(|| malformed("empty `journal`"))?;
        let mut seen = HashSet::new();
        let mut references = Vec::with_capacity(self.references.len());
        for reference in self.references {
            let reference =
                ArticleId::new(reference).ok_or_else(|| malformed("empty reference id"))?;
            if reference == id {
                return Err(IngestError::SelfCitation { line, id });
            }
            // repeated references collapse to one boolean rating
            if seen.insert(reference.clone()) {
                references.push(reference);
            }
        }
        Ok(Article {
            id,
            title: self.title,
            journal,
            year: self.year,
            references,
            full_text: self.full_text,
        })
    }
}

/// An immutable collection of articles with a journal registry.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    articles: Vec<Article>,
    by_id: HashMap<ArticleId, usize>,
    journals: BTreeMap<JournalId, Vec<usize>>,
}

impl Corpus {
    pub fn from_articles(articles: Vec<Article>) -> Result<Self, IngestError> {
        let mut corpus = Corpus::default();
        for (position, article) in articles.into_iter().enumerate() {
            corpus.push(article, position + 1)?;
        }
        Ok(corpus)
    }

    fn push(&mut self, article: Article, line: usize) -> Result<(), IngestError> {
        if self.by_id.contains_key(&article.id) {
            return Err(IngestError::DuplicateArticle {
                line,
                id: article.id,
            });
        }
        if article.references.contains(&article.id) {
            return Err(IngestError::SelfCitation {
                line,
                id: article.id,
            });
        }
        let index = self.articles.len();
        self.by_id.insert(article.id.clone(), index);
        self.journals
            .entry(article.journal.clone())
            .or_default()
            .push(index);
        self.articles.push(article);
        Ok(())
    }

    /// Reads the JSON-lines article format. Blank lines are ignored; errors
    /// carry the 1-based line number.
    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self, IngestError> {
        let mut corpus = Corpus::default();
        for (index, line) in reader.lines().enumerate() {
            let line_no = index + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ArticleRecord =
                serde_json::from_str(&line).map_err(|e| IngestError::Malformed {
                    line: line_no,
                    message: e.to_string(),
                })?;
            corpus.push(record.validate(line_no)?, line_no)?;
        }
        Ok(corpus)
    }

    /// Writes the canonical form: one article per line, sorted by id.
    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for article in self.sorted_articles() {
            serde_json::to_writer(&mut writer, article)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON-lines form, hex encoded. Stable under
    /// reordering of the input file.
    pub fn fingerprint(&self) -> String {
        let mut buffer = Vec::new();
        self.write_jsonl(&mut buffer)
            .expect("writing to a Vec cannot fail");
        hex::encode(Sha256::digest(&buffer))
    }

    fn sorted_articles(&self) -> Vec<&Article> {
        let mut sorted: Vec<&Article> = self.articles.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        sorted
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    /// Articles in ingest order.
    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn get(&self, id: &str) -> Option<&Article> {
        self.by_id.get(id).map(|&index| &self.articles[index])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn journal_of(&self, id: &str) -> Option<&JournalId> {
        self.get(id).map(|article| &article.journal)
    }

    /// Distinct journal ids, ascending.
    pub fn journals(&self) -> impl Iterator<Item = &JournalId> {
        self.journals.keys()
    }

    pub fn journal_count(&self) -> usize {
        self.journals.len()
    }

    /// Member articles of `journal`, in ingest order.
    pub fn journal_articles<'a>(&'a self, journal: &str) -> impl Iterator<Item = &'a Article> + 'a {
        self.journals
            .get(journal)
            .into_iter()
            .flatten()
            .map(move |&index| &self.articles[index])
    }

    /// Reference targets that have no record in the corpus.
    pub fn dangling_references(&self) -> BTreeSet<&ArticleId> {
        self.articles
            .iter()
            .flat_map(|article| article.references.iter())
            .filter(|reference| !self.contains(reference.as_str()))
            .collect()
    }
}

/// One download of `article` by `actor` at `timestamp` (seconds since epoch).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UsageEvent {
    pub actor: ActorId,
    pub article: ArticleId,
    pub timestamp: u64,
}

/// Reads the `actor,article,timestamp` CSV format. Timestamps must be
/// non-negative integers; fractional seconds are rejected.
pub fn read_usage_csv<R: Read>(reader: R) -> Result<Vec<UsageEvent>, IngestError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(|e| IngestError::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    if headers != vec!["actor", "article", "timestamp"] {
        return Err(IngestError::Malformed {
            line: 1,
            message: format!("expected header `actor,article,timestamp`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut events = Vec::new();
    for result in csv.records() {
        let record = result.map_err(|e| IngestError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let malformed = |message: String| IngestError::Malformed { line, message };
        let actor = ActorId::new(&record[0]).ok_or_else(|| malformed("empty actor".into()))?;
        let article = ArticleId::new(&record[1]).ok_or_else(|| malformed("empty article".into()))?;
        let raw = &record[2];
        if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed(format!(
                "timestamp `{raw}` is not a non-negative integer number of seconds"
            )));
        }
        let timestamp = raw
            .parse::<u64>()
            .map_err(|e| malformed(format!("timestamp `{raw}`: {e}")))?;
        events.push(UsageEvent {
            actor,
            article,
            timestamp,
        });
    }
    Ok(events)
}

/// Writes events in the CSV format, sorted by (actor, timestamp, article).
pub fn write_usage_csv<W: Write>(events: &[UsageEvent], writer: W) -> std::io::Result<()> {
    let mut sorted: Vec<&UsageEvent> = events.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.actor, a.timestamp, &a.article).cmp(&(&b.actor, b.timestamp, &b.article))
    });
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["actor", "article", "timestamp"])?;
    for event in sorted {
        csv.write_record([
            event.actor.as_str(),
            event.article.as_str(),
            &event.timestamp.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Corpus, IngestError> {
        Corpus::read_jsonl(text.as_bytes())
    }

    #[test]
    fn loads_records_and_journal_registry() {
        let corpus = load(concat!(
            r#"{"id":"A","title":"a","journal":"J1","year":2001,"references":["B"]}"#,
            "\n",
            r#"{"id":"B","title":"b","journal":"J2","year":2000,"references":[]}"#,
            "\n",
            r#"{"id":"C","title":"c","journal":"J1","year":2002,"references":["A","B"],"full_text":"x"}"#,
            "\n"
        ))
        .unwrap();
        assert_eq!(corpus.len(), 3);
        let journals: Vec<&str> = corpus.journals().map(|j| j.as_str()).collect();
        assert_eq!(journals, ["J1", "J2"]);
        assert_eq!(corpus.journal_articles("J1").count(), 2);
        assert_eq!(corpus.get("C").unwrap().full_text.as_deref(), Some("x"));
    }

    #[test]
    fn self_citation_is_rejected_with_line_number() {
        let err = load(concat!(
            r#"{"id":"A","title":"a","journal":"J","year":2001,"references":[]}"#,
            "\n",
            r#"{"id":"B","title":"b","journal":"J","year":2001,"references":["A","B"]}"#,
        ))
        .unwrap_err();
        assert!(matches!(err, IngestError::SelfCitation { line: 2, .. }), "{err}");
    }

    #[test]
    fn dangling_reference_survives_ingest() {
        let corpus = load(concat!(
            r#"{"id":"A","title":"a","journal":"J","year":2001,"references":["Z"]}"#,
            "\n",
            r#"{"id":"B","title":"b","journal":"J","year":2001,"references":["A"]}"#,
        ))
        .unwrap();
        assert_eq!(corpus.get("A").unwrap().references, vec![ArticleId::from("Z")]);
        let dangling: Vec<&str> = corpus.dangling_references().into_iter().map(|a| a.as_str()).collect();
        assert_eq!(dangling, ["Z"]);
    }

    #[test]
    fn duplicate_id_and_malformed_lines_are_errors() {
        let dup = load(concat!(
            r#"{"id":"A","title":"a","journal":"J","year":2001,"references":[]}"#,
            "\n",
            r#"{"id":"A","title":"a","journal":"J","year":2001,"references":[]}"#,
        ))
        .unwrap_err();
        assert!(matches!(dup, IngestError::DuplicateArticle { line: 2, .. }));

        let bad = load("\n{\"id\":\"A\"}\n").unwrap_err();
        assert!(matches!(bad, IngestError::Malformed { line: 2, .. }), "{bad}");

        let empty = load(r#"{"id":"","title":"a","journal":"J","year":2001,"references":[]}"#).unwrap_err();
        assert!(matches!(empty, IngestError::Malformed { line: 1, .. }));
    }

    #[test]
    fn repeated_references_are_collapsed() {
        let corpus =
            load(r#"{"id":"A","title":"a","journal":"J","year":2001,"references":["B","C","B"]}"#).unwrap();
        assert_eq!(corpus.get("A").unwrap().references.len(), 2);
    }

    #[test]
    fn fingerprint_ignores_input_order() {
        let a = r#"{"id":"A","title":"a","journal":"J","year":2001,"references":[]}"#;
        let b = r#"{"id":"B","title":"b","journal":"J","year":2001,"references":["A"]}"#;
        let one = load(&format!("{a}\n{b}\n")).unwrap();
        let two = load(&format!("{b}\n{a}\n")).unwrap();
        assert_eq!(one.fingerprint(), two.fingerprint());
        assert_eq!(one.fingerprint().len(), 64);
    }

    #[test]
    fn usage_csv_parses_and_rejects_fractional_seconds() {
        let events = read_usage_csv("actor,article,timestamp\nu,x,0\nu,y,100\n".as_bytes()).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[1].timestamp, 100);

        let err = read_usage_csv("actor,article,timestamp\nu,x,0\nu,y,1.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 3, .. }), "{err}");
        let err = read_usage_csv("actor,article,timestamp\nu,x,-4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 2, .. }), "{err}");
        let err = read_usage_csv("user,item,ts\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 1, .. }));
    }

    #[test]
    fn usage_csv_round_trips_through_canonical_order() {
        let events = read_usage_csv("actor,article,timestamp\nv,z,5\nu,y,9\nu,x,3\n".as_bytes()).unwrap();
        let mut out = Vec::new();
        write_usage_csv(&events, &mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), "actor,article,timestamp\nu,x,3\nu,y,9\nv,z,5\n");
        let mut reread = read_usage_csv(out.as_slice()).unwrap();
        let mut original = events;
        reread.sort();
        original.sort();
        assert_eq!(reread, original);
    }
}
