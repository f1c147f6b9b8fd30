//! Item-item cosine similarity over boolean actor vectors.
//!
//! For items `i` and `j` with actor sets `A_i` and `A_j`:
//!
//! ```text
//! sim(i, j) = |A_i ∩ A_j| / sqrt(|A_i| · |A_j|)
//! ```
//!
//! For citations this is co-citation count normalised by the citer-set
//! sizes; for usage it is the number of shared sessions normalised by each
//! article's session count.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::ArticleId;
use crate::matrix::InteractionMatrix;

pub const DEFAULT_NEIGHBORHOOD: usize = 50;
pub const DEFAULT_MIN_COOCCURRENCE: u32 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("neighborhood size must be at least 1")]
    ZeroNeighborhood,
    #[error("min_cooccurrence must be at least 1")]
    ZeroMinCooccurrence,
    #[error("invalid neighborhood `{0}`: expected a positive integer or `all`")]
    BadNeighborhood(String),
}

/// How many neighbors each item keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    Top(NonZeroUsize),
    /// Keep every neighbor with non-zero similarity.
    All,
}

impl Neighborhood {
    pub fn top(k: usize) -> Result<Self, ParamsError> {
        NonZeroUsize::new(k)
            .map(Neighborhood::Top)
            .ok_or(ParamsError::ZeroNeighborhood)
    }

    pub fn limit(self) -> Option<usize> {
        match self {
            Neighborhood::Top(k) => Some(k.get()),
            Neighborhood::All => None,
        }
    }
}

impl Default for Neighborhood {
    fn default() -> Self {
        Neighborhood::Top(NonZeroUsize::new(DEFAULT_NEIGHBORHOOD).unwrap())
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Neighborhood::Top(k) => write!(f, "{k}"),
            Neighborhood::All => f.write_str("all"),
        }
    }
}

impl FromStr for Neighborhood {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") || s.eq_ignore_ascii_case("inf") {
            return Ok(Neighborhood::All);
        }
        let k: usize = s.parse().map_err(|_| ParamsError::BadNeighborhood(s.to_string()))?;
        Neighborhood::top(k)
    }
}

impl Serialize for Neighborhood {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.limit() {
            Some(k) => serializer.serialize_some(&k),
            None => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Neighborhood {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match Option::<usize>::deserialize(deserializer)? {
            None => Ok(Neighborhood::All),
            Some(k) => Neighborhood::top(k).map_err(serde::de::Error::custom),
        }
    }
}

/// Which interaction matrix an index was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Citation,
    Usage,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Citation => "citation",
            Provenance::Usage => "usage",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexParams {
    pub neighborhood: Neighborhood,
    /// Pairs sharing fewer actors than this are dropped before ranking.
    pub min_cooccurrence: u32,
}

impl IndexParams {
    pub fn new(neighborhood: Neighborhood, min_cooccurrence: u32) -> Result<Self, ParamsError> {
        if min_cooccurrence == 0 {
            return Err(ParamsError::ZeroMinCooccurrence);
        }
        Ok(IndexParams {
            neighborhood,
            min_cooccurrence,
        })
    }

    /// Citation defaults: k = 50, no co-occurrence floor.
    pub fn citation() -> Self {
        IndexParams {
            neighborhood: Neighborhood::default(),
            min_cooccurrence: 1,
        }
    }

    /// Usage defaults: k = 50, pairs must share at least two sessions.
    pub fn usage() -> Self {
        IndexParams {
            neighborhood: Neighborhood::default(),
            min_cooccurrence: DEFAULT_MIN_COOCCURRENCE,
        }
    }
}

/// One link hidden from the model, used to evaluate a held-out reference
/// without rebuilding the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskedLink {
    pub row: usize,
    pub col: u32,
}

/// Column postings over an interaction matrix, answering neighbor queries
/// for single items.
pub struct CooccurrenceModel<'m> {
    matrix: &'m InteractionMatrix,
    postings: Vec<Vec<u32>>,
}

impl<'m> CooccurrenceModel<'m> {
    pub fn new(matrix: &'m InteractionMatrix) -> Self {
        let mut postings = vec![Vec::new(); matrix.n_cols()];
        for (row, col) in matrix.links() {
            postings[col as usize].push(row as u32);
        }
        CooccurrenceModel { matrix, postings }
    }

    pub fn matrix(&self) -> &'m InteractionMatrix {
        self.matrix
    }

    fn actor_count(&self, col: u32, mask: Option<MaskedLink>) -> usize {
        let count = self.postings[col as usize].len();
        match mask {
            Some(m) if m.col == col && self.matrix.rows()[m.row].binary_search(&col).is_ok() => count - 1,
            _ => count,
        }
    }

    /// Ranked neighbors of column `col`: score descending, ties by ascending
    /// column (which is ascending article id).
    pub fn neighbors_of(&self, col: u32, params: &IndexParams, mask: Option<MaskedLink>) -> Vec<(u32, f64)> {
        let own = self.actor_count(col, mask);
        if own == 0 {
            return Vec::new();
        }
        let mut shared: HashMap<u32, u32> = HashMap::new();
        for &row in &self.postings[col as usize] {
            let row = row as usize;
            let masked_row = mask.filter(|m| m.row == row);
            if masked_row.is_some_and(|m| m.col == col) {
                continue;
            }
            for &other in &self.matrix.rows()[row] {
                if other == col || masked_row.is_some_and(|m| m.col == other) {
                    continue;
                }
                *shared.entry(other).or_insert(0) += 1;
            }
        }
        let mut neighbors: Vec<(u32, f64)> = shared
            .into_iter()
            .filter(|&(_, count)| count >= params.min_cooccurrence)
            .map(|(other, count)| {
                let other_count = self.actor_count(other, mask);
                (other, cosine(count as usize, own, other_count))
            })
            .collect();
        sort_neighbors(&mut neighbors);
        if let Some(k) = params.neighborhood.limit() {
            neighbors.truncate(k);
        }
        neighbors
    }
}

/// Cosine of two boolean vectors from their overlap and sizes.
pub fn cosine(shared: usize, size_a: usize, size_b: usize) -> f64 {
    let value = shared as f64 / ((size_a as f64) * (size_b as f64)).sqrt();
    value.min(1.0)
}

fn sort_neighbors(neighbors: &mut [(u32, f64)]) {
    neighbors.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Build-time metadata carried into the serialized index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMeta {
    /// Fingerprint of the corpus the index was built against.
    pub corpus_fingerprint: String,
    /// Session window used to build a usage matrix.
    pub window: Option<u64>,
}

/// Precomputed top-k neighbor lists for every item with at least one actor.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSimilarityIndex {
    pub(crate) provenance: Provenance,
    pub(crate) params: IndexParams,
    pub(crate) meta: IndexMeta,
    /// Ascending.
    pub(crate) item_ids: Vec<ArticleId>,
    /// Per item: (index into `item_ids`, similarity).
    pub(crate) neighbors: Vec<Vec<(u32, f64)>>,
}

impl ItemSimilarityIndex {
    pub fn build(matrix: &InteractionMatrix, provenance: Provenance, params: IndexParams) -> Self {
        let model = CooccurrenceModel::new(matrix);
        let neighbors = (0..matrix.n_cols() as u32)
            .into_par_iter()
            .map(|col| model.neighbors_of(col, &params, None))
            .collect();
        ItemSimilarityIndex {
            provenance,
            params,
            meta: IndexMeta::default(),
            item_ids: matrix.col_ids().to_vec(),
            neighbors,
        }
    }

    pub fn with_meta(mut self, meta: IndexMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn params(&self) -> &IndexParams {
        &self.params
    }

    pub fn meta(&self) -> &IndexMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.item_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.item_ids.is_empty()
    }

    pub fn item_ids(&self) -> &[ArticleId] {
        &self.item_ids
    }

    pub fn contains(&self, item: &str) -> bool {
        self.position(item).is_some()
    }

    fn position(&self, item: &str) -> Option<usize> {
        self.item_ids.binary_search_by(|probe| probe.as_str().cmp(item)).ok()
    }

    /// Ranked neighbors of `item`; empty for items not in the index.
    pub fn neighbors(&self, item: &str) -> impl Iterator<Item = (&ArticleId, f64)> + '_ {
        self.position(item)
            .into_iter()
            .flat_map(move |index| self.neighbors[index].iter())
            .map(move |&(other, score)| (&self.item_ids[other as usize], score))
    }

    /// Similarity of `a` to `b` as stored in `a`'s neighbor list.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        self.neighbors(a).find(|(other, _)| other.as_str() == b).map(|(_, score)| score)
    }
}

/// Citation index: rows are citing articles, items are cited articles.
pub fn build_similarity_index(matrix: &InteractionMatrix, neighborhood: Neighborhood) -> ItemSimilarityIndex {
    ItemSimilarityIndex::build(
        matrix,
        Provenance::Citation,
        IndexParams {
            neighborhood,
            min_cooccurrence: 1,
        },
    )
}

/// Usage index: rows are sessions; pairs sharing fewer than
/// `min_cooccurrence` sessions are dropped.
pub fn build_usage_index(
    matrix: &InteractionMatrix,
    neighborhood: Neighborhood,
    min_cooccurrence: u32,
) -> Result<ItemSimilarityIndex, ParamsError> {
    let params = IndexParams::new(neighborhood, min_cooccurrence)?;
    Ok(ItemSimilarityIndex::build(matrix, Provenance::Usage, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[(&str, &[&str])]) -> InteractionMatrix {
        InteractionMatrix::from_rows(
            rows.iter()
                .map(|(label, items)| (label.to_string(), items.iter().map(|&i| ArticleId::from(i)).collect())),
        )
    }

    fn co_citation_fixture() -> InteractionMatrix {
        matrix(&[("A", &["C", "D"]), ("B", &["C", "D", "E"])])
    }

    #[test]
    fn hand_computed_citation_similarities() {
        let index = build_similarity_index(&co_citation_fixture(), Neighborhood::All);
        assert_eq!(index.similarity("C", "D"), Some(1.0));
        let ce = index.similarity("C", "E").unwrap();
        assert!((ce - 0.5f64.sqrt()).abs() < 1e-12, "{ce}");
        let c: Vec<&str> = index.neighbors("C").map(|(id, _)| id.as_str()).collect();
        assert_eq!(c, ["D", "E"]);
        assert_eq!(index.neighbors("C").count(), 2);
    }

    #[test]
    fn disjoint_items_are_not_neighbors() {
        let index = build_similarity_index(&matrix(&[("A", &["x", "y"]), ("B", &["z"])]), Neighborhood::All);
        assert_eq!(index.similarity("x", "z"), None);
        assert_eq!(index.neighbors("z").count(), 0);
        assert!(index.contains("z"));
    }

    #[test]
    fn usage_floor_drops_single_shared_session() {
        let sessions = matrix(&[("s1", &["x", "y"]), ("s2", &["x", "y", "z"])]);
        let loose = build_usage_index(&sessions, Neighborhood::All, 1).unwrap();
        assert_eq!(loose.similarity("x", "y"), Some(1.0));
        assert!(loose.similarity("x", "z").is_some());
        let strict = build_usage_index(&sessions, Neighborhood::All, 2).unwrap();
        assert_eq!(strict.similarity("x", "y"), Some(1.0));
        assert_eq!(strict.similarity("x", "z"), None);
        assert_eq!(build_usage_index(&sessions, Neighborhood::All, 0).unwrap_err(), ParamsError::ZeroMinCooccurrence);
        assert!(build_usage_index(&InteractionMatrix::default(), Neighborhood::All, 2).unwrap().is_empty());
    }

    #[test]
    fn truncation_keeps_best_with_id_tiebreak() {
        // b, c and d all co-occur once with a: equal scores, so ids decide
        let m = matrix(&[("r", &["a", "d", "c", "b"])]);
        let index = build_similarity_index(&m, Neighborhood::top(2).unwrap());
        let a: Vec<&str> = index.neighbors("a").map(|(id, _)| id.as_str()).collect();
        assert_eq!(a, ["b", "c"]);
    }

    #[test]
    fn masking_a_link_matches_rebuilding_without_it() {
        let full = matrix(&[("A", &["C", "D"]), ("B", &["C", "D", "E"]), ("F", &["C", "E"])]);
        let reduced = matrix(&[("A", &["C", "D"]), ("B", &["C", "D", "E"]), ("F", &["C"])]);
        let params = IndexParams::new(Neighborhood::All, 1).unwrap();
        let masked_model = CooccurrenceModel::new(&full);
        let mask = MaskedLink {
            row: full.row_index("F").unwrap(),
            col: full.col_index("E").unwrap(),
        };
        let rebuilt = ItemSimilarityIndex::build(&reduced, Provenance::Citation, params);
        for item in ["C", "D"] {
            let masked: Vec<(&str, f64)> = masked_model
                .neighbors_of(full.col_index(item).unwrap(), &params, Some(mask))
                .into_iter()
                .map(|(col, s)| (full.col_ids()[col as usize].as_str(), s))
                .collect();
            let expected: Vec<(&str, f64)> = rebuilt.neighbors(item).map(|(id, s)| (id.as_str(), s)).collect();
            assert_eq!(masked, expected, "item {item}");
        }
    }

    #[test]
    fn neighborhood_parsing() {
        assert_eq!("all".parse::<Neighborhood>().unwrap(), Neighborhood::All);
        assert_eq!("7".parse::<Neighborhood>().unwrap().limit(), Some(7));
        assert_eq!("0".parse::<Neighborhood>().unwrap_err(), ParamsError::ZeroNeighborhood);
        assert!("x".parse::<Neighborhood>().is_err());
    }
}
