//! Indirect author relations: `[author i] - [indirect author j] - [user u]`.
//!
//! A triplet is scored as `Relevance(i, j) * Influence(j, u)` where
//!
//! ```text
//! Relevance(i, j) = a * log(co_authored(i, j) + 1) + b * log(cited(i, j) + 1)
//! Influence(j, u) = log(engaged(j, u)) * h_index(j)
//! ```
//!
//! The influence term has no `+1`, so a candidate the user engaged with only
//! once scores zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AuthorId, CorpusIndex, Paper, PaperId, UserId, UserProfile};
use crate::relevance::{SourceOptions, UserSources};

/// Relative difference under which two triplet scores are treated as tied.
pub const SCORE_TIE_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoringParams {
    /// Co-authorship weight.
    pub a: f64,
    /// Citation weight.
    pub b: f64,
    pub log_base: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            a: 2.0,
            b: 1.0,
            log_base: std::f64::consts::E,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("scoring weights must be positive and finite (a = {a}, b = {b})")]
    Weights { a: f64, b: f64 },
    #[error("log base must be finite and greater than 1, got {0}")]
    LogBase(f64),
    #[error("author `{0}` has no engagement with the user")]
    NotACandidate(AuthorId),
    #[error("author and indirect author must differ (`{0}`)")]
    SameAuthor(AuthorId),
}

impl ScoringParams {
    pub fn validate(&self) -> Result<(), ScoringError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.a) || !ok(self.b) {
            return Err(ScoringError::Weights { a: self.a, b: self.b });
        }
        if !(self.log_base.is_finite() && self.log_base > 1.0) {
            return Err(ScoringError::LogBase(self.log_base));
        }
        Ok(())
    }

    fn log(&self, x: f64) -> f64 {
        x.ln() / self.log_base.ln()
    }

    pub fn relevance(&self, co_authored: u32, cited: u32) -> f64 {
        self.a * self.log(f64::from(co_authored) + 1.0) + self.b * self.log(f64::from(cited) + 1.0)
    }

    pub fn influence(&self, engaged: u32, h_index: u32) -> f64 {
        self.log(f64::from(engaged)) * f64::from(h_index)
    }
}

/// How the user engaged with a candidate's papers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngagementAction {
    CoAuthored,
    Cited,
    Saved,
    MoreLikeThis,
}

impl EngagementAction {
    /// Priority order used to break ties between equal counts.
    pub const PRIORITY: [EngagementAction; 4] = [
        EngagementAction::CoAuthored,
        EngagementAction::Cited,
        EngagementAction::Saved,
        EngagementAction::MoreLikeThis,
    ];
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementBreakdown {
    pub co_authored: u32,
    pub cited: u32,
    pub saved: u32,
    pub more_like_this: u32,
}

impl EngagementBreakdown {
    pub fn get(&self, action: EngagementAction) -> u32 {
        match action {
            EngagementAction::CoAuthored => self.co_authored,
            EngagementAction::Cited => self.cited,
            EngagementAction::Saved => self.saved,
            EngagementAction::MoreLikeThis => self.more_like_this,
        }
    }

    /// `engaged(j, u)`: sum over actions, so a paper reached through two
    /// actions counts twice.
    pub fn engaged(&self) -> u32 {
        self.co_authored + self.cited + self.saved + self.more_like_this
    }

    /// Action with the largest count; ties follow [`EngagementAction::PRIORITY`].
    pub fn dominant(&self) -> EngagementAction {
        let mut best = EngagementAction::CoAuthored;
        for action in EngagementAction::PRIORITY {
            if self.get(action) > self.get(best) {
                best = action;
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub author_i: AuthorId,
    pub indirect_j: AuthorId,
    pub user_u: UserId,
    pub co_authored_ij: u32,
    pub cited_ij: u32,
    pub engaged_ju: u32,
    pub h_index_j: u32,
    pub relevance: f64,
    pub influence: f64,
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuthorRelation {
    CoAuthored,
    Cited,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndirectRelation {
    pub paper_id: PaperId,
    pub triplet: Triplet,
    pub line1_relation: AuthorRelation,
    pub line2_action: EngagementAction,
    pub line2_count: u32,
}

impl IndirectRelation {
    pub fn line1_count(&self) -> u32 {
        match self.line1_relation {
            AuthorRelation::CoAuthored => self.triplet.co_authored_ij,
            AuthorRelation::Cited => self.triplet.cited_ij,
        }
    }
}

/// Candidate indirect authors with their engagement breakdown.
pub type Candidates = BTreeMap<AuthorId, EngagementBreakdown>;

pub(crate) fn candidates_from_sources(
    sources: &UserSources,
    positive_feed: &BTreeSet<PaperId>,
    index: &CorpusIndex,
) -> Candidates {
    let mut out = Candidates::new();
    for author in index.publishing_authors() {
        if Some(author) == sources.user_author.as_ref() {
            continue;
        }
        let papers = index.papers_by(author);
        let count = |set: &BTreeSet<PaperId>| papers.iter().filter(|p| set.contains(*p)).count() as u32;
        let b = EngagementBreakdown {
            co_authored: count(&sources.authored),
            cited: count(&sources.cited),
            saved: count(&sources.library),
            more_like_this: count(positive_feed),
        };
        if b.engaged() > 0 {
            out.insert(author.clone(), b);
        }
    }
    out
}

/// Authors other than the user whose papers the user co-authored, cited,
/// saved, or rated "more like this".
pub fn candidate_indirect_authors(user: &UserProfile, index: &CorpusIndex) -> Candidates {
    let sources = UserSources::new(user, index, SourceOptions::default());
    let positive: BTreeSet<PaperId> = user.feed_papers(true);
    candidates_from_sources(&sources, &positive, index)
}

/// Papers co-authored by `i` and `j`, and papers of `i` cited by any paper of `j`.
pub fn author_pair_counts(i: &AuthorId, j: &AuthorId, index: &CorpusIndex) -> (u32, u32) {
    let of_i = index.papers_by(i);
    let of_j = index.papers_by(j);
    let co = of_i.intersection(of_j).count() as u32;
    let cited = of_i.intersection(index.papers_cited_by(j)).count() as u32;
    (co, cited)
}

fn build_triplet(
    i: &AuthorId,
    j: &AuthorId,
    user: &UserId,
    engaged: u32,
    index: &CorpusIndex,
    params: &ScoringParams,
) -> Triplet {
    let (co, cited) = author_pair_counts(i, j, index);
    let h = index.h_index(j);
    let relevance = params.relevance(co, cited);
    let influence = params.influence(engaged, h);
    Triplet {
        author_i: i.clone(),
        indirect_j: j.clone(),
        user_u: user.clone(),
        co_authored_ij: co,
        cited_ij: cited,
        engaged_ju: engaged,
        h_index_j: h,
        relevance,
        influence,
        score: relevance * influence,
    }
}

pub fn score_triplet(
    i: &AuthorId,
    j: &AuthorId,
    user: &UserProfile,
    index: &CorpusIndex,
    params: &ScoringParams,
) -> Result<Triplet, ScoringError> {
    params.validate()?;
    if i == j {
        return Err(ScoringError::SameAuthor(i.clone()));
    }
    let engaged = candidate_indirect_authors(user, index)
        .get(j)
        .map(EngagementBreakdown::engaged)
        .unwrap_or(0);
    if engaged == 0 {
        return Err(ScoringError::NotACandidate(j.clone()));
    }
    Ok(build_triplet(i, j, &user.id, engaged, index, params))
}

/// Orders scores descending, treating relative differences below
/// [`SCORE_TIE_EPSILON`] as ties.
pub fn compare_scores(x: f64, y: f64) -> Ordering {
    let scale = x.abs().max(y.abs());
    if (x - y).abs() <= SCORE_TIE_EPSILON * scale {
        Ordering::Equal
    } else {
        y.partial_cmp(&x).unwrap_or(Ordering::Equal)
    }
}

pub(crate) fn rank_with_candidates(
    user: &UserId,
    user_author: Option<&AuthorId>,
    candidates: &Candidates,
    paper: &Paper,
    index: &CorpusIndex,
    params: &ScoringParams,
) -> Option<IndirectRelation> {
    let on_paper: BTreeSet<&AuthorId> = paper.authors.iter().collect();
    let mut best: Option<(Triplet, &EngagementBreakdown)> = None;
    for i in &on_paper {
        for (j, breakdown) in candidates {
            if on_paper.contains(j) || Some(j) == user_author {
                continue;
            }
            let t = build_triplet(i, j, user, breakdown.engaged(), index, params);
            if t.score.is_nan() || t.score <= 0.0 {
                continue;
            }
            let better = match &best {
                None => true,
                Some((b, _)) => match compare_scores(t.score, b.score) {
                    Ordering::Less => true,
                    Ordering::Equal => (&t.author_i, &t.indirect_j) < (&b.author_i, &b.indirect_j),
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((t, breakdown));
            }
        }
    }
    let (triplet, breakdown) = best?;
    let co_part = params.a * params.log(f64::from(triplet.co_authored_ij) + 1.0);
    let cited_part = params.b * params.log(f64::from(triplet.cited_ij) + 1.0);
    let line1_relation = if co_part > cited_part {
        AuthorRelation::CoAuthored
    } else {
        AuthorRelation::Cited
    };
    let line2_action = breakdown.dominant();
    Some(IndirectRelation {
        paper_id: paper.id.clone(),
        line1_relation,
        line2_action,
        line2_count: breakdown.get(line2_action),
        triplet,
    })
}

/// Highest-scoring triplet over the paper's authors and the user's
/// candidates. Equal scores resolve to the lexicographically smallest
/// `(author, indirect author)` pair.
pub fn rank_triplets(
    user: &UserProfile,
    paper: &Paper,
    index: &CorpusIndex,
    params: &ScoringParams,
) -> Option<IndirectRelation> {
    let candidates = candidate_indirect_authors(user, index);
    let user_author = index.user_author_id(user);
    rank_with_candidates(&user.id, user_author.as_ref(), &candidates, paper, index, params)
}
