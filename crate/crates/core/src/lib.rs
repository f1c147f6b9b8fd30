//! Scholarly-article recommendation from two interaction sources.
//!
//! * [`corpus`] loads articles and usage logs.
//! * [`matrix`] turns them into boolean actor × item matrices.
//! * [`similarity`] computes item-item cosine neighborhoods; [`simidx`]
//!   stores them.
//! * [`engine`] wraps an index into a named [`engine::Recommender`]: the
//!   `citation` engine treats each article as a user whose references are
//!   its ratings, the `usage` engine works from co-downloads.
//! * [`semantic`] builds journal vectors used to measure how far
//!   recommendations stray from the seed's journal.
//! * [`evaluation`] runs held-out-reference accuracy and the two-engine
//!   coverage/complementarity/diversity comparison.
//! * [`artifacts`] loads a built data directory; [`api`] renders the JSON
//!   views shared by the CLI and the HTTP service.
//! * [`fixture`] generates synthetic two-topic corpora.

pub mod api;
pub mod artifacts;
pub mod corpus;
pub mod engine;
pub mod evaluation;
pub mod fixture;
pub mod ids;
pub mod matrix;
pub mod semantic;
pub mod simidx;
pub mod similarity;

pub use corpus::{Article, Corpus, UsageEvent};
pub use engine::{Recommendation, Recommender};
pub use ids::{ActorId, ArticleId, JournalId};
pub use matrix::InteractionMatrix;
pub use similarity::{ItemSimilarityIndex, Neighborhood};
