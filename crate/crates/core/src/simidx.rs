//! `.simidx` serialization of an [`ItemSimilarityIndex`].
//!
//! The file is UTF-8 text:
//!
//! ```text
//! SIMIDX/1
//! {"provenance":"citation","k":50,"min_cooccurrence":1,"window":null,"corpus_fingerprint":"…","items":3}
//! {"item":"C","neighbors":[["D",1.0],["E",0.7071067811865475]]}
//! …
//! ```
//!
//! The first line is the magic and format version, the second the header,
//! then one line per item in ascending id order. Scores are printed in their
//! shortest round-trip form, so reading a file back is lossless.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::ArticleId;
use crate::similarity::{IndexMeta, IndexParams, ItemSimilarityIndex, Neighborhood, Provenance};

pub const MAGIC: &str = "SIMIDX/1";

#[derive(Debug, Error)]
pub enum SimIdxError {
    #[error("not a similarity index: expected magic `{MAGIC}`, found `{0}`")]
    BadMagic(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    provenance: Provenance,
    k: Neighborhood,
    min_cooccurrence: u32,
    window: Option<u64>,
    corpus_fingerprint: String,
    items: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemLine {
    item: ArticleId,
    neighbors: Vec<(ArticleId, f64)>,
}

pub fn write<W: Write>(index: &ItemSimilarityIndex, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    let header = Header {
        provenance: index.provenance,
        k: index.params.neighborhood,
        min_cooccurrence: index.params.min_cooccurrence,
        window: index.meta.window,
        corpus_fingerprint: index.meta.corpus_fingerprint.clone(),
        items: index.item_ids.len(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for (item, neighbors) in index.item_ids.iter().zip(&index.neighbors) {
        let line = ItemLine {
            item: item.clone(),
            neighbors: neighbors
                .iter()
                .map(|&(other, score)| (index.item_ids[other as usize].clone(), score))
                .collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read<R: BufRead>(input: R) -> Result<ItemSimilarityIndex, SimIdxError> {
    let mut lines = input.lines();
    let magic = lines.next().transpose()?.unwrap_or_default();
    if magic != MAGIC {
        return Err(SimIdxError::BadMagic(magic));
    }
    let malformed = |line: usize, message: String| SimIdxError::Malformed { line, message };
    let header_line = lines
        .next()
        .transpose()?
        .ok_or_else(|| malformed(2, "missing header".into()))?;
    let header: Header = serde_json::from_str(&header_line).map_err(|e| malformed(2, e.to_string()))?;
    let params = IndexParams::new(header.k, header.min_cooccurrence).map_err(|e| malformed(2, e.to_string()))?;

    let mut raw = Vec::with_capacity(header.items);
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 3;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let parsed: ItemLine = serde_json::from_str(&line).map_err(|e| malformed(line_no, e.to_string()))?;
        raw.push((line_no, parsed));
    }
    if raw.len() != header.items {
        return Err(malformed(2, format!("header declares {} items, found {}", header.items, raw.len())));
    }
    let item_ids: Vec<ArticleId> = raw.iter().map(|(_, line)| line.item.clone()).collect();
    if let Some(pos) = item_ids.windows(2).position(|w| w[0] >= w[1]) {
        return Err(malformed(raw[pos + 1].0, "items must be unique and in ascending order".into()));
    }

    let mut neighbors = Vec::with_capacity(raw.len());
    for (position, (line_no, line)) in raw.into_iter().enumerate() {
        let mut list = Vec::with_capacity(line.neighbors.len());
        for (other, score) in line.neighbors {
            let other_index = item_ids
                .binary_search(&other)
                .map_err(|_| malformed(line_no, format!("unknown neighbor `{other}`")))?;
            if other_index == position {
                return Err(malformed(line_no, "item lists itself as a neighbor".into()));
            }
            if !(score > 0.0 && score <= 1.0) {
                return Err(malformed(line_no, format!("score {score} outside (0, 1]")));
            }
            list.push((other_index as u32, score));
        }
        let ordered = list
            .windows(2)
            .all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        if !ordered {
            return Err(malformed(line_no, "neighbors not ranked by score then id".into()));
        }
        if params.neighborhood.limit().is_some_and(|k| list.len() > k) {
            return Err(malformed(line_no, "more neighbors than k".into()));
        }
        neighbors.push(list);
    }

    Ok(ItemSimilarityIndex {
        provenance: header.provenance,
        params,
        meta: IndexMeta {
            corpus_fingerprint: header.corpus_fingerprint,
            window: header.window,
        },
        item_ids,
        neighbors,
    })
}
