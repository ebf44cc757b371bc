//! Relevance messages for scholarly paper recommendation alerts.
//!
//! The crate explains why each recommended paper may matter to a user by
//! relating it to the user's own papers, library, feeds and citations, then
//! renders those explanations into alert emails and evaluates their effect
//! on engagement.

pub mod analytics;
pub mod composer;
pub mod corpus;
pub mod digest;
pub mod indirect;
pub mod relevance;
pub mod rng;
pub mod simulator;
pub mod synth;
pub mod templates;

pub use composer::{
    apply_coverage_cap, AlertEmail, Composer, ComposerOptions, Condition, EmailRequest,
    Recommendation,
};
pub use corpus::{
    ingest_corpus, ingest_users, Author, AuthorId, CorpusError, CorpusIndex, Feed, FeedId, Paper,
    PaperId, Rating, UserId, UserProfile,
};
pub use indirect::{rank_triplets, score_triplet, IndirectRelation, ScoringParams, Triplet};
pub use relevance::{
    extract_citation_relation, extract_direct_author_relation, CitationRelation,
    DirectAuthorRelation, SourceKind,
};
pub use simulator::{simulate, EmailMeta, SimConfig};
pub use templates::{render_message, MessageKind, MessageTemplateSet, Relation};
