//! Citation-based and direct author-based relevance relations.
//!
//! Both kinds of relation are computed only from the user's sources, the
//! alert paper and the corpus. Recommendation scores never enter here.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{user_cited_set, AuthorId, CorpusIndex, FeedId, Paper, PaperId, UserProfile};
use crate::rng;

/// Where a user expressed interest in a paper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Authored,
    Library,
    Feed,
    /// Papers cited by the user's own papers. Direct author relations only.
    Cited,
}

impl SourceKind {
    pub const ALL: [SourceKind; 4] = [
        SourceKind::Authored,
        SourceKind::Library,
        SourceKind::Feed,
        SourceKind::Cited,
    ];
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceOptions {
    /// Only positively rated feed papers count as feed sources.
    #[serde(default)]
    pub exclude_negative_from_sources: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRelation {
    pub paper_id: PaperId,
    pub counts: BTreeMap<SourceKind, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feed_breakdown: Option<BTreeMap<FeedId, u32>>,
}

impl CitationRelation {
    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectAuthorRelation {
    pub paper_id: PaperId,
    pub featured_author: AuthorId,
    pub counts: BTreeMap<SourceKind, u32>,
}

impl DirectAuthorRelation {
    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }
}

/// A user's relevance sources resolved against a corpus.
#[derive(Clone, Debug)]
pub struct UserSources {
    pub authored: BTreeSet<PaperId>,
    pub library: BTreeSet<PaperId>,
    pub feed: BTreeSet<PaperId>,
    pub feeds: Vec<(FeedId, BTreeSet<PaperId>)>,
    pub cited: BTreeSet<PaperId>,
    pub user_author: Option<AuthorId>,
}

impl UserSources {
    pub fn new(user: &UserProfile, index: &CorpusIndex, opts: SourceOptions) -> Self {
        let feeds: Vec<_> = user
            .feeds
            .iter()
            .map(|f| {
                let members = f
                    .member_papers(opts.exclude_negative_from_sources)
                    .cloned()
                    .collect();
                (f.feed_id.clone(), members)
            })
            .collect();
        Self {
            authored: user.authored.clone(),
            library: user.library.clone(),
            feed: user.feed_papers(opts.exclude_negative_from_sources),
            feeds,
            cited: user_cited_set(user, index),
            user_author: index.user_author_id(user),
        }
    }

    pub fn set(&self, kind: SourceKind) -> &BTreeSet<PaperId> {
        match kind {
            SourceKind::Authored => &self.authored,
            SourceKind::Library => &self.library,
            SourceKind::Feed => &self.feed,
            SourceKind::Cited => &self.cited,
        }
    }

    /// Citation relation: per-source sizes of `paper.references ∩ source`.
    pub fn citation_relation(&self, paper: &Paper) -> Option<CitationRelation> {
        let refs = |set: &BTreeSet<PaperId>| {
            paper
                .references
                .iter()
                .filter(|r| *r != &paper.id && set.contains(*r))
                .count() as u32
        };
        let counts: BTreeMap<_, _> = [SourceKind::Authored, SourceKind::Library, SourceKind::Feed]
            .into_iter()
            .map(|k| (k, refs(self.set(k))))
            .filter(|(_, n)| *n > 0)
            .collect();
        if counts.is_empty() {
            return None;
        }
        let feed_breakdown = counts.contains_key(&SourceKind::Feed).then(|| {
            self.feeds
                .iter()
                .map(|(id, members)| (id.clone(), refs(members)))
                .filter(|(_, n)| *n > 0)
                .collect()
        });
        Some(CitationRelation {
            paper_id: paper.id.clone(),
            counts,
            feed_breakdown,
        })
    }

    /// Per-source counts of `author`'s papers, never counting `exclude`.
    pub fn author_counts(
        &self,
        index: &CorpusIndex,
        author: &AuthorId,
        exclude: &PaperId,
    ) -> BTreeMap<SourceKind, u32> {
        let papers = index.papers_by(author);
        SourceKind::ALL
            .into_iter()
            .map(|k| {
                let set = self.set(k);
                let n = papers
                    .iter()
                    .filter(|p| *p != exclude && set.contains(*p))
                    .count() as u32;
                (k, n)
            })
            .filter(|(_, n)| *n > 0)
            .collect()
    }

    /// Direct-author relation: the paper author with the most papers across the user's
    /// sources. Ties are broken by a draw keyed on `(seed, paper id)`.
    pub fn direct_author_relation(
        &self,
        paper: &Paper,
        index: &CorpusIndex,
        seed: u64,
    ) -> Option<DirectAuthorRelation> {
        let mut seen = BTreeSet::new();
        let mut best: Vec<(AuthorId, BTreeMap<SourceKind, u32>)> = Vec::new();
        let mut best_total = 0u32;
        for author in &paper.authors {
            if !seen.insert(author) || Some(author) == self.user_author.as_ref() {
                continue;
            }
            let counts = self.author_counts(index, author, &paper.id);
            let total: u32 = counts.values().sum();
            if total == 0 || total < best_total {
                continue;
            }
            if total > best_total {
                best.clear();
                best_total = total;
            }
            best.push((author.clone(), counts));
        }
        if best.is_empty() {
            return None;
        }
        best.sort_by(|a, b| a.0.cmp(&b.0));
        let pick = if best.len() == 1 {
            0
        } else {
            rng::draw_index(seed, rng::hash_str(paper.id.as_str()), 0, best.len())
        };
        let (featured_author, counts) = best.swap_remove(pick);
        Some(DirectAuthorRelation {
            paper_id: paper.id.clone(),
            featured_author,
            counts,
        })
    }
}

pub fn extract_citation_relation(
    user: &UserProfile,
    paper: &Paper,
    index: &CorpusIndex,
) -> Option<CitationRelation> {
    UserSources::new(user, index, SourceOptions::default()).citation_relation(paper)
}

pub fn extract_direct_author_relation(
    user: &UserProfile,
    paper: &Paper,
    index: &CorpusIndex,
    rng_seed: u64,
) -> Option<DirectAuthorRelation> {
    UserSources::new(user, index, SourceOptions::default())
        .direct_author_relation(paper, index, rng_seed)
}
