//! Binary journal vector store (`.jvec`).
//!
//! All integers and floats are little-endian:
//!
//! ```text
//! magic        b"JVEC"
//! version      u16 (= 1)
//! dimension    u32
//! seed_entries u32
//! rng_seed     u64
//! fingerprint  u32 length + UTF-8 bytes
//! count        u32
//! count × record:
//!   journal       u32 length + UTF-8 bytes
//!   article_count u64
//!   token_count   u64
//!   empty         u8 (0 or 1)
//!   vector        dimension × f64, omitted when empty
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};

use thiserror::Error;

use super::{JournalVector, JournalVectorStore, SemanticConfig, SemanticError};
use crate::ids::JournalId;

pub const MAGIC: &[u8; 4] = b"JVEC";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("not a journal vector store (bad magic)")]
    BadMagic,
    #[error("unsupported vector store version {0}")]
    Version(u16),
    #[error("corrupt vector store: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Config(#[from] SemanticError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn write_str<W: Write>(out: &mut W, value: &str) -> std::io::Result<()> {
    out.write_all(&(value.len() as u32).to_le_bytes())?;
    out.write_all(value.as_bytes())
}

pub fn write<W: Write>(store: &JournalVectorStore, mut out: W) -> std::io::Result<()> {
    let config = store.config();
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(config.dimension as u32).to_le_bytes())?;
    out.write_all(&(config.seed_entries as u32).to_le_bytes())?;
    out.write_all(&config.rng_seed.to_le_bytes())?;
    write_str(&mut out, store.corpus_fingerprint())?;
    out.write_all(&(store.len() as u32).to_le_bytes())?;
    for vector in store.journals() {
        write_str(&mut out, vector.journal.as_str())?;
        out.write_all(&vector.article_count.to_le_bytes())?;
        out.write_all(&vector.token_count.to_le_bytes())?;
        out.write_all(&[u8::from(vector.empty)])?;
        if !vector.empty {
            for value in &vector.vector {
                out.write_all(&value.to_le_bytes())?;
            }
        }
    }
    out.flush()
}

struct Input<R> {
    inner: R,
}

impl<R: Read> Input<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N], StoreError> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => StoreError::Corrupt("truncated file".into()),
            _ => StoreError::Io(e),
        })?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32, StoreError> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64, StoreError> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn string(&mut self) -> Result<String, StoreError> {
        let len = self.u32()? as usize;
        let mut buf = vec![0u8; len];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| StoreError::Corrupt("truncated string".into()))?;
        String::from_utf8(buf).map_err(|_| StoreError::Corrupt("invalid UTF-8".into()))
    }
}

pub fn read<R: Read>(reader: R) -> Result<JournalVectorStore, StoreError> {
    let mut input = Input { inner: reader };
    if &input.bytes::<4>()? != MAGIC {
        return Err(StoreError::BadMagic);
    }
    let version = u16::from_le_bytes(input.bytes()?);
    if version != VERSION {
        return Err(StoreError::Version(version));
    }
    let dimension = input.u32()? as usize;
    let seed_entries = input.u32()? as usize;
    let rng_seed = input.u64()?;
    let config = SemanticConfig::new(dimension, seed_entries, rng_seed)?;
    let fingerprint = input.string()?;
    let count = input.u32()?;
    let mut vectors = BTreeMap::new();
    for _ in 0..count {
        let journal = JournalId::new(input.string()?)
            .ok_or_else(|| StoreError::Corrupt("empty journal id".into()))?;
        let article_count = input.u64()?;
        let token_count = input.u64()?;
        let empty = match input.bytes::<1>()?[0] {
            0 => false,
            1 => true,
            other => return Err(StoreError::Corrupt(format!("bad empty flag {other}"))),
        };
        let vector = if empty {
            vec![0.0; dimension]
        } else {
            (0..dimension)
                .map(|_| Ok(f64::from_le_bytes(input.bytes()?)))
                .collect::<Result<Vec<f64>, StoreError>>()?
        };
        let record = JournalVector {
            journal: journal.clone(),
            vector,
            article_count,
            token_count,
            empty,
        };
        if vectors.insert(journal.clone(), record).is_some() {
            return Err(StoreError::Corrupt(format!("duplicate journal `{journal}`")));
        }
    }
    let mut trailing = [0u8; 1];
    if input.inner.read(&mut trailing)? != 0 {
        return Err(StoreError::Corrupt("trailing bytes".into()));
    }
    Ok(JournalVectorStore::from_parts(config, fingerprint, vectors))
}
