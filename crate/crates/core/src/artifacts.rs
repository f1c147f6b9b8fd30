//! On-disk layout of a data directory and loading of a consistent set of
//! built artifacts.
//!
//! ```text
//! articles.jsonl          canonical corpus
//! usage.csv               canonical usage log (optional)
//! manifest.json           ingest summary
//! <engine>.simidx         one per built engine (citation.simidx, usage.simidx)
//! journals.jvec           journal vector store
//! journal_similarity.csv  exported journal similarity matrix
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{Corpus, IngestError, UsageEvent};
use crate::engine::{load_engine, EngineError, EngineRegistry};
use crate::semantic::store_io::{self, StoreError};
use crate::semantic::JournalVectorStore;
use crate::simidx::{self, SimIdxError};
use crate::similarity::ItemSimilarityIndex;

pub const ARTICLES_FILE: &str = "articles.jsonl";
pub const USAGE_FILE: &str = "usage.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const VECTORS_FILE: &str = "journals.jvec";
pub const SIMILARITY_CSV: &str = "journal_similarity.csv";

pub fn index_file(engine: &str) -> String {
    format!("{engine}.simidx")
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error("{path}: {source}")]
    Index { path: PathBuf, source: SimIdxError },
    #[error("{path}: {source}")]
    Vectors { path: PathBuf, source: StoreError },
    #[error("{path}: {source}")]
    Engine { path: PathBuf, source: EngineError },
    #[error("{path} was built from corpus {found}, but the loaded corpus is {expected}")]
    FingerprintMismatch { path: PathBuf, expected: String, found: String },
    #[error("{path}: a second index for engine `{engine}`")]
    DuplicateEngine { path: PathBuf, engine: String },
}

fn open(path: &Path) -> Result<File, ArtifactError> {
    File::open(path).map_err(|source| ArtifactError::Io { path: path.to_path_buf(), source })
}

/// SHA-256 of a file's bytes, hex encoded.
pub fn file_digest(path: &Path) -> Result<String, ArtifactError> {
    let mut file = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let read = file
            .read(&mut buf)
            .map_err(|source| ArtifactError::Io { path: path.to_path_buf(), source })?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn load_corpus(path: &Path) -> Result<Corpus, ArtifactError> {
    Corpus::read_jsonl(BufReader::new(open(path)?))
        .map_err(|source| ArtifactError::Ingest { path: path.to_path_buf(), source })
}

pub fn load_usage(path: &Path) -> Result<Vec<UsageEvent>, ArtifactError> {
    crate::corpus::read_usage_csv(BufReader::new(open(path)?))
        .map_err(|source| ArtifactError::Ingest { path: path.to_path_buf(), source })
}

pub fn load_index(path: &Path) -> Result<ItemSimilarityIndex, ArtifactError> {
    simidx::read(BufReader::new(open(path)?)).map_err(|source| ArtifactError::Index { path: path.to_path_buf(), source })
}

pub fn load_vectors(path: &Path) -> Result<JournalVectorStore, ArtifactError> {
    store_io::read(BufReader::new(open(path)?))
        .map_err(|source| ArtifactError::Vectors { path: path.to_path_buf(), source })
}

/// Summary written by `ingest`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub corpus_fingerprint: String,
    pub articles: usize,
    pub journals: usize,
    pub references: usize,
    pub dangling_references: usize,
    pub usage_events: Option<usize>,
}

impl Manifest {
    pub fn describe(corpus: &Corpus, usage: Option<&[UsageEvent]>) -> Self {
        Manifest {
            corpus_fingerprint: corpus.fingerprint(),
            articles: corpus.len(),
            journals: corpus.journal_count(),
            references: corpus.articles().iter().map(|a| a.references.len()).sum(),
            dangling_references: corpus.dangling_references().len(),
            usage_events: usage.map(<[UsageEvent]>::len),
        }
    }
}

/// Files making up one servable artifact set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactPaths {
    pub corpus: PathBuf,
    pub indices: Vec<PathBuf>,
    pub vectors: PathBuf,
}

impl ArtifactPaths {
    /// The standard layout of `dir`, with both engine indices.
    pub fn in_dir(dir: &Path) -> Self {
        ArtifactPaths {
            corpus: dir.join(ARTICLES_FILE),
            indices: crate::engine::engine_names().into_iter().map(|name| dir.join(index_file(name))).collect(),
            vectors: dir.join(VECTORS_FILE),
        }
    }
}

/// Digests reported by health checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprints {
    pub corpus: String,
    /// File name to SHA-256 of its bytes.
    pub files: BTreeMap<String, String>,
}

/// Immutable, mutually consistent artifacts ready to answer queries.
pub struct LoadedArtifacts {
    pub corpus: Arc<Corpus>,
    pub engines: EngineRegistry,
    pub indices: BTreeMap<&'static str, Arc<ItemSimilarityIndex>>,
    pub vectors: Arc<JournalVectorStore>,
    pub fingerprints: Fingerprints,
}

impl LoadedArtifacts {
    pub fn load(paths: &ArtifactPaths) -> Result<Self, ArtifactError> {
        let corpus = Arc::new(load_corpus(&paths.corpus)?);
        let expected = corpus.fingerprint();
        let check = |path: &Path, found: &str| {
            if found == expected {
                Ok(())
            } else {
                Err(ArtifactError::FingerprintMismatch {
                    path: path.to_path_buf(),
                    expected: expected.clone(),
                    found: found.to_string(),
                })
            }
        };
        let mut files = BTreeMap::new();
        let mut record = |path: &Path| -> Result<(), ArtifactError> {
            let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
            files.insert(name, file_digest(path)?);
            Ok(())
        };
        record(&paths.corpus)?;

        let mut engines = EngineRegistry::new();
        let mut indices = BTreeMap::new();
        for path in &paths.indices {
            let index = Arc::new(load_index(path)?);
            check(path, &index.meta().corpus_fingerprint)?;
            let engine = load_engine(index.clone(), corpus.clone())
                .map_err(|source| ArtifactError::Engine { path: path.clone(), source })?;
            if indices.insert(engine.name(), index).is_some() {
                return Err(ArtifactError::DuplicateEngine { path: path.clone(), engine: engine.name().to_string() });
            }
            engines.register(engine);
            record(path)?;
        }

        let vectors = Arc::new(load_vectors(&paths.vectors)?);
        check(&paths.vectors, vectors.corpus_fingerprint())?;
        record(&paths.vectors)?;

        Ok(LoadedArtifacts {
            corpus,
            engines,
            indices,
            vectors,
            fingerprints: Fingerprints { corpus: expected, files },
        })
    }
}
