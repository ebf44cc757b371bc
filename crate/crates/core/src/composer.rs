//! Alert email assembly under a coverage cap.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusIndex, FeedId, Paper, PaperId, UserId, UserProfile};
use crate::indirect::{candidates_from_sources, rank_with_candidates, Candidates, ScoringError, ScoringParams};
use crate::relevance::{SourceOptions, UserSources};
use crate::templates::{render_message, MessageKind, MessageTemplateSet, Relation, TemplateError};

/// Default share of an email's papers that may carry a message.
pub const DEFAULT_CAP: f64 = 0.5;

/// Experimental condition an email is generated under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    Control,
    Citation,
    DirectAuthor,
    IndirectAuthor,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::Control,
        Condition::Citation,
        Condition::DirectAuthor,
        Condition::IndirectAuthor,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Control => "control",
            Condition::Citation => "citation",
            Condition::DirectAuthor => "direct-author",
            Condition::IndirectAuthor => "indirect-author",
        }
    }

    pub fn message_kind(&self) -> Option<MessageKind> {
        match self {
            Condition::Control => None,
            Condition::Citation => Some(MessageKind::Citation),
            Condition::DirectAuthor => Some(MessageKind::DirectAuthor),
            Condition::IndirectAuthor => Some(MessageKind::IndirectAuthor),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown condition `{0}` (expected control, citation, direct-author or indirect-author)")]
pub struct UnknownCondition(pub String);

impl FromStr for Condition {
    type Err = UnknownCondition;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCondition(s.to_owned()))
    }
}

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("coverage cap must lie in [0, 1], got {0}")]
    Cap(f64),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachedMessage {
    pub kind: MessageKind,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub paper_id: PaperId,
    pub title: String,
    pub authors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<AttachedMessage>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlertEmail {
    pub user_id: UserId,
    pub feed_id: FeedId,
    pub feed_name: String,
    pub date: String,
    pub condition: Condition,
    pub cap: f64,
    pub recommendations: Vec<Recommendation>,
}

impl AlertEmail {
    pub fn email_id(&self) -> String {
        format!("{}_{}_{}", self.user_id, self.feed_id, self.date)
    }

    pub fn message_count(&self) -> usize {
        self.recommendations.iter().filter(|r| r.message.is_some()).count()
    }

    /// Fraction of recommendations carrying a message; 0 for an empty email.
    pub fn pct_featured(&self) -> f64 {
        if self.recommendations.is_empty() {
            0.0
        } else {
            self.message_count() as f64 / self.recommendations.len() as f64
        }
    }

    pub fn message_kinds(&self) -> BTreeSet<MessageKind> {
        self.recommendations
            .iter()
            .filter_map(|r| r.message.as_ref().map(|m| m.kind))
            .collect()
    }
}

/// One email to assemble: the recommended papers for a user's feed on a date.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmailRequest {
    pub user_id: UserId,
    pub feed_id: FeedId,
    pub date: String,
    pub papers: Vec<PaperId>,
}

/// A paper eligible for a message, with its relation and ordering strength.
#[derive(Clone, Debug, PartialEq)]
pub struct CapCandidate {
    pub paper_id: PaperId,
    pub relation: Relation,
    pub strength: f64,
}

/// `floor(cap * n_total)`, tolerant of representation error in `cap`
/// (so that 0.29 * 100 yields 29).
pub fn cap_limit(n_total: usize, cap: f64) -> usize {
    if cap >= 1.0 {
        return n_total;
    }
    ((cap * n_total as f64) + 1e-9).floor().max(0.0) as usize
}

/// Keeps the `min(|candidates|, floor(cap * n_total))` strongest candidates.
/// Equal strengths are ordered by paper id. The result is in selection order.
pub fn apply_coverage_cap(
    mut candidates: Vec<CapCandidate>,
    n_total: usize,
    cap: f64,
) -> Result<Vec<CapCandidate>, ComposeError> {
    if !(0.0..=1.0).contains(&cap) {
        return Err(ComposeError::Cap(cap));
    }
    let k = cap_limit(n_total, cap).min(candidates.len());
    candidates.sort_by(|x, y| {
        y.strength
            .partial_cmp(&x.strength)
            .unwrap_or(Ordering::Equal)
            .then_with(|| x.paper_id.cmp(&y.paper_id))
    });
    candidates.truncate(k);
    Ok(candidates)
}

/// Order tried for each paper when cascading across message kinds.
pub const CASCADE_ORDER: [MessageKind; 3] =
    [MessageKind::DirectAuthor, MessageKind::Citation, MessageKind::IndirectAuthor];

#[derive(Clone, Debug, Default)]
pub struct ComposerOptions {
    pub templates: MessageTemplateSet,
    pub params: ScoringParams,
    pub sources: SourceOptions,
    /// Fall back to other message kinds (direct > citation > indirect) when
    /// the condition's own kind finds no relation for a paper.
    pub cascade: bool,
}

/// Relation extraction for one user against a fixed corpus.
pub struct UserContext<'a> {
    index: &'a CorpusIndex,
    user: &'a UserProfile,
    sources: UserSources,
    candidates: Candidates,
}

impl<'a> UserContext<'a> {
    pub fn new(index: &'a CorpusIndex, user: &'a UserProfile, opts: SourceOptions) -> Self {
        let sources = UserSources::new(user, index, opts);
        let positive = user.feed_papers(true);
        let candidates = candidates_from_sources(&sources, &positive, index);
        Self {
            index,
            user,
            sources,
            candidates,
        }
    }

    pub fn relation(
        &self,
        kind: MessageKind,
        paper: &Paper,
        params: &ScoringParams,
        seed: u64,
    ) -> Option<Relation> {
        match kind {
            MessageKind::Citation => self.sources.citation_relation(paper).map(Relation::Citation),
            MessageKind::DirectAuthor => self
                .sources
                .direct_author_relation(paper, self.index, seed)
                .map(Relation::DirectAuthor),
            MessageKind::IndirectAuthor => rank_with_candidates(
                &self.user.id,
                self.sources.user_author.as_ref(),
                &self.candidates,
                paper,
                self.index,
                params,
            )
            .map(Relation::IndirectAuthor),
        }
    }
}

pub struct Composer<'a> {
    index: &'a CorpusIndex,
    opts: ComposerOptions,
}

impl<'a> Composer<'a> {
    pub fn new(index: &'a CorpusIndex, opts: ComposerOptions) -> Result<Self, ComposeError> {
        opts.params.validate()?;
        Ok(Self { index, opts })
    }

    pub fn index(&self) -> &CorpusIndex {
        self.index
    }

    pub fn user_context(&self, user: &'a UserProfile) -> UserContext<'a> {
        UserContext::new(self.index, user, self.opts.sources)
    }

    /// Builds one alert email. Paper ids missing from the corpus are skipped.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble_email(
        &self,
        user: &'a UserProfile,
        feed_id: &FeedId,
        date: &str,
        papers: &[PaperId],
        condition: Condition,
        cap: f64,
        seed: u64,
    ) -> Result<AlertEmail, ComposeError> {
        let ctx = self.user_context(user);
        self.assemble_with(&ctx, feed_id, date, papers, condition, cap, seed)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn assemble_with(
        &self,
        ctx: &UserContext<'_>,
        feed_id: &FeedId,
        date: &str,
        papers: &[PaperId],
        condition: Condition,
        cap: f64,
        seed: u64,
    ) -> Result<AlertEmail, ComposeError> {
        if !(0.0..=1.0).contains(&cap) {
            return Err(ComposeError::Cap(cap));
        }
        let mut resolved: Vec<&Paper> = Vec::with_capacity(papers.len());
        for id in papers {
            match self.index.paper(id) {
                Some(p) => resolved.push(p),
                None => warn!("skipping unknown paper `{id}` in email for user `{}`", ctx.user.id),
            }
        }

        let mut kinds: Vec<MessageKind> = condition.message_kind().into_iter().collect();
        if self.opts.cascade {
            if let Some(primary) = kinds.first().copied() {
                kinds.extend(CASCADE_ORDER.into_iter().filter(|k| *k != primary));
            }
        }

        let mut candidates = Vec::new();
        for paper in &resolved {
            if let Some(rel) = kinds
                .iter()
                .find_map(|k| ctx.relation(*k, paper, &self.opts.params, seed))
            {
                candidates.push(CapCandidate {
                    paper_id: paper.id.clone(),
                    strength: rel.strength(),
                    relation: rel,
                });
            }
        }
        let selected = apply_coverage_cap(candidates, resolved.len(), cap)?;

        let mut recommendations = Vec::with_capacity(resolved.len());
        for paper in &resolved {
            let message = match selected.iter().find(|c| c.paper_id == paper.id) {
                Some(c) => Some(AttachedMessage {
                    kind: c.relation.kind(),
                    text: render_message(&c.relation, &self.opts.templates, self.index)?,
                }),
                None => None,
            };
            recommendations.push(Recommendation {
                paper_id: paper.id.clone(),
                title: paper.title.clone(),
                authors: paper
                    .authors
                    .iter()
                    .map(|a| self.index.display_name(a).to_owned())
                    .collect(),
                message,
            });
        }
        let feed_name = ctx
            .user
            .feed(feed_id)
            .map(|f| f.name.clone())
            .unwrap_or_else(|| feed_id.to_string());
        Ok(AlertEmail {
            user_id: ctx.user.id.clone(),
            feed_id: feed_id.clone(),
            feed_name,
            date: date.to_owned(),
            condition,
            cap,
            recommendations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relevance::{CitationRelation, SourceKind};
    use proptest::prelude::*;

    fn cand(id: &str, strength: f64) -> CapCandidate {
        CapCandidate {
            paper_id: id.into(),
            relation: Relation::Citation(CitationRelation {
                paper_id: id.into(),
                counts: [(SourceKind::Library, 1)].into(),
                feed_breakdown: None,
            }),
            strength,
        }
    }

    #[test]
    fn cap_examples() {
        let cands: Vec<_> = (0..7).map(|k| cand(&format!("p{k}"), k as f64)).collect();
        let got = apply_coverage_cap(cands.clone(), 10, 0.5).unwrap();
        assert_eq!(got.len(), 5);
        assert_eq!(got[0].paper_id.as_str(), "p6");
        assert!(apply_coverage_cap(cands.clone(), 10, 0.0).unwrap().is_empty());
        assert_eq!(apply_coverage_cap(cands.clone(), 10, 1.0).unwrap().len(), 7);
        assert!(matches!(apply_coverage_cap(cands, 10, 1.5), Err(ComposeError::Cap(_))));
    }

    #[test]
    fn cap_limit_floor() {
        assert_eq!(cap_limit(10, 0.5), 5);
        assert_eq!(cap_limit(11, 0.5), 5);
        assert_eq!(cap_limit(100, 0.29), 29);
        assert_eq!(cap_limit(3, 0.0), 0);
        assert_eq!(cap_limit(3, 1.0), 3);
    }

    #[test]
    fn condition_names_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.as_str().parse::<Condition>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.as_str()));
        }
        assert!("treatment".parse::<Condition>().is_err());
    }

    proptest! {
        #[test]
        fn cap_matches_sort_oracle(
            strengths in proptest::collection::vec(0u8..6, 0..30),
            n_extra in 0usize..20,
            cap in 0.0f64..=1.0,
        ) {
            let cands: Vec<_> = strengths
                .iter()
                .enumerate()
                .map(|(k, s)| cand(&format!("p{k:02}"), f64::from(*s)))
                .collect();
            let n_total = cands.len() + n_extra;
            let got: BTreeSet<String> = apply_coverage_cap(cands.clone(), n_total, cap)
                .unwrap()
                .into_iter()
                .map(|c| c.paper_id.0)
                .collect();

            // Oracle: full sort by (strength desc, id asc), take the prefix.
            let mut all: Vec<(u8, String)> = strengths
                .iter()
                .enumerate()
                .map(|(k, s)| (*s, format!("p{k:02}")))
                .collect();
            all.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let k = ((cap * n_total as f64) + 1e-9).floor() as usize;
            let want: BTreeSet<String> = all.into_iter().take(k.min(cands.len())).map(|x| x.1).collect();
            prop_assert_eq!(got, want);
        }
    }
}
