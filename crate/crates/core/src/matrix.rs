//! Boolean actor × item interaction matrices.
//!
//! Both engines consume the same structure: for citations the actors are
//! citing articles and the items are cited articles; for usage the actors
//! are download sessions and the items are the downloaded articles.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::corpus::{Corpus, UsageEvent};
use crate::ids::ArticleId;

/// Default inactivity gap, in seconds, that closes a usage session.
pub const DEFAULT_SESSION_WINDOW: u64 = 1800;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("session window must be positive")]
    ZeroWindow,
}

/// A sparse boolean matrix. Rows and columns are addressed by index; column
/// ids are sorted ascending so column order equals id order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InteractionMatrix {
    row_ids: Vec<String>,
    col_ids: Vec<ArticleId>,
    /// Sorted, deduplicated column indices per row.
    rows: Vec<Vec<u32>>,
}

impl InteractionMatrix {
    /// Builds a matrix from labelled rows. Columns are every item that
    /// appears in some row; duplicate items within a row collapse.
    pub fn from_rows<I, L>(rows: I) -> Self
    where
        I: IntoIterator<Item = (L, Vec<ArticleId>)>,
        L: Into<String>,
    {
        let rows: Vec<(String, Vec<ArticleId>)> =
            rows.into_iter().map(|(label, items)| (label.into(), items)).collect();
        let col_ids: Vec<ArticleId> = rows
            .iter()
            .flat_map(|(_, items)| items.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let col_index: BTreeMap<&ArticleId, u32> = col_ids
            .iter()
            .enumerate()
            .map(|(index, id)| (id, index as u32))
            .collect();
        let mut row_ids = Vec::with_capacity(rows.len());
        let mut row_items = Vec::with_capacity(rows.len());
        for (label, items) in &rows {
            let mut cols: Vec<u32> = items.iter().map(|item| col_index[item]).collect();
            cols.sort_unstable();
            cols.dedup();
            row_ids.push(label.clone());
            row_items.push(cols);
        }
        InteractionMatrix {
            row_ids,
            col_ids,
            rows: row_items,
        }
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[ArticleId] {
        &self.col_ids
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn n_links(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn col_index(&self, id: &str) -> Option<u32> {
        self.col_ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .ok()
            .map(|index| index as u32)
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.row_ids.iter().position(|row| row == label)
    }

    /// Column ids of row `row`.
    pub fn row_items(&self, row: usize) -> impl Iterator<Item = &ArticleId> {
        self.rows[row].iter().map(|&col| &self.col_ids[col as usize])
    }

    /// All (row, col) links in row-major order.
    pub fn links(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(row, cols)| cols.iter().map(move |&col| (row, col)))
    }

    /// Links divided by the number of possible links; 0 for a matrix with
    /// no rows or no columns.
    pub fn sparsity(&self) -> f64 {
        sparsity(self)
    }
}

/// Rows are the articles with at least one reference (ascending id); a link
/// `(a, b)` exists iff `a` cites `b`. Dangling references become columns.
pub fn build_citation_matrix(corpus: &Corpus) -> InteractionMatrix {
    let mut citing: Vec<_> = corpus
        .articles()
        .iter()
        .filter(|article| !article.references.is_empty())
        .collect();
    citing.sort_by(|a, b| a.id.cmp(&b.id));
    InteractionMatrix::from_rows(
        citing
            .into_iter()
            .map(|article| (article.id.to_string(), article.references.clone())),
    )
}

/// Splits each actor's events into sessions at gaps longer than `window`
/// seconds. Rows are labelled `{actor}#{n}` with `n` counting that actor's
/// sessions from 0; single-article sessions are kept.
pub fn sessionize(events: &[UsageEvent], window: u64) -> Result<InteractionMatrix, MatrixError> {
    if window == 0 {
        return Err(MatrixError::ZeroWindow);
    }
    let mut sorted: Vec<&UsageEvent> = events.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.actor, a.timestamp, &a.article).cmp(&(&b.actor, b.timestamp, &b.article))
    });

    let mut sessions: Vec<(String, Vec<ArticleId>)> = Vec::new();
    let mut previous: Option<&UsageEvent> = None;
    let mut session_no = 0usize;
    for event in sorted {
        let same_session = previous.is_some_and(|prev| {
            prev.actor == event.actor && event.timestamp - prev.timestamp <= window
        });
        if !same_session {
            session_no = match previous {
                Some(prev) if prev.actor == event.actor => session_no + 1,
                _ => 0,
            };
            sessions.push((format!("{}#{}", event.actor, session_no), Vec::new()));
        }
        sessions
            .last_mut()
            .expect("a session was just opened")
            .1
            .push(event.article.clone());
        previous = Some(event);
    }
    Ok(InteractionMatrix::from_rows(sessions))
}

/// `|links| / (|rows| × |cols|)`, or 0 when either dimension is empty.
pub fn sparsity(matrix: &InteractionMatrix) -> f64 {
    let possible = matrix.n_rows() as f64 * matrix.n_cols() as f64;
    if possible == 0.0 {
        0.0
    } else {
        matrix.n_links() as f64 / possible
    }
}
