//! Message templates and relation-to-text rendering.
//!
//! Templates are plain strings with `{name}` placeholders. A placeholder the
//! renderer does not supply is a hard error, as is an override for a key
//! that does not exist.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusIndex;
use crate::indirect::{AuthorRelation, EngagementAction, IndirectRelation};
use crate::relevance::{CitationRelation, DirectAuthorRelation, SourceKind};

/// Separator between message fragments from different sources.
pub const FRAGMENT_SEPARATOR: &str = ", ";

const DEFAULTS: &[(&str, &str)] = &[
    ("citation.message", "This paper cites {fragments}"),
    ("citation.authored", "{n} {papers} you authored"),
    ("citation.library", "{n} {papers} in your library"),
    ("citation.feed", "{n} {papers} in your feed"),
    ("citation.feeds", "{n} {papers} in your feeds"),
    ("citation.library_and_feeds", "{n} {papers} in your library and feeds"),
    ("direct.message", "{author} {fragments}"),
    ("direct.authored", "co-authored {n} {papers} with you"),
    ("direct.library", "authored {n} {papers} in your library"),
    ("direct.feed", "authored {n} {papers} in your feed"),
    ("direct.cited", "authored {n} {papers} you cited"),
    ("direct.library_and_feeds", "authored {n} {papers} in your library and feeds"),
    ("indirect.line1.cited", "{author}* has authored {n} {papers} that {indirect} cited."),
    ("indirect.line1.co_authored", "{author}* has co-authored {n} {papers} with {indirect}."),
    ("indirect.line2.co_authored", "You co-authored {n} {papers} with {indirect}."),
    ("indirect.line2.cited", "You cited {n} of {indirect}'s papers."),
    ("indirect.line2.saved", "You saved {n} of {indirect}'s papers in the library."),
    (
        "indirect.line2.more_like_this",
        "You marked {n} of {indirect}'s papers as \"more like this\" in your feed.",
    ),
    ("paper.singular", "paper"),
    ("paper.plural", "papers"),
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("unknown template key `{0}`")]
    UnknownKey(String),
    #[error("template `{key}` uses unknown placeholder `{{{placeholder}}}`")]
    UnknownPlaceholder { key: String, placeholder: String },
    #[error("template `{key}` has an unterminated placeholder")]
    Unterminated { key: String },
    #[error("invalid template file: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, String>", into = "BTreeMap<String, String>")]
pub struct MessageTemplateSet {
    entries: BTreeMap<String, String>,
}

impl Default for MessageTemplateSet {
    fn default() -> Self {
        Self {
            entries: DEFAULTS
                .iter()
                .map(|(k, v)| ((*k).to_owned(), (*v).to_owned()))
                .collect(),
        }
    }
}

impl TryFrom<BTreeMap<String, String>> for MessageTemplateSet {
    type Error = TemplateError;

    fn try_from(overrides: BTreeMap<String, String>) -> Result<Self, Self::Error> {
        let mut set = Self::default();
        set.apply(overrides)?;
        Ok(set)
    }
}

impl From<MessageTemplateSet> for BTreeMap<String, String> {
    fn from(set: MessageTemplateSet) -> Self {
        set.entries
    }
}

impl MessageTemplateSet {
    /// Citation messages in the digest style, led by "Also cites:".
    pub fn also_cites() -> Self {
        let mut set = Self::default();
        set.entries
            .insert("citation.message".into(), "Also cites: {fragments}".into());
        set
    }

    /// Parses a JSON object of key → template overrides on top of the defaults.
    pub fn from_json(json: &str) -> Result<Self, TemplateError> {
        let overrides: BTreeMap<String, String> =
            serde_json::from_str(json).map_err(|e| TemplateError::Parse(e.to_string()))?;
        Self::try_from(overrides)
    }

    pub fn apply(&mut self, overrides: BTreeMap<String, String>) -> Result<(), TemplateError> {
        for (k, v) in overrides {
            match self.entries.get_mut(&k) {
                Some(slot) => *slot = v,
                None => return Err(TemplateError::UnknownKey(k)),
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<&str, TemplateError> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| TemplateError::UnknownKey(key.to_owned()))
    }

    /// Substitutes `vars` into the template stored under `key`.
    pub fn fill(&self, key: &str, vars: &[(&str, &str)]) -> Result<String, TemplateError> {
        let template = self.get(key)?;
        let mut out = String::with_capacity(template.len() + 32);
        let mut rest = template;
        while let Some(start) = rest.find('{') {
            out.push_str(&rest[..start]);
            let after = &rest[start + 1..];
            let end = after.find('}').ok_or_else(|| TemplateError::Unterminated {
                key: key.to_owned(),
            })?;
            let name = &after[..end];
            let value = vars
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| TemplateError::UnknownPlaceholder {
                    key: key.to_owned(),
                    placeholder: name.to_owned(),
                })?;
            out.push_str(value);
            rest = &after[end + 1..];
        }
        out.push_str(rest);
        Ok(out)
    }

    fn noun(&self, n: u32) -> Result<&str, TemplateError> {
        self.get(if n == 1 { "paper.singular" } else { "paper.plural" })
    }

    fn count_fragment(&self, key: &str, n: u32, extra: &[(&str, &str)]) -> Result<String, TemplateError> {
        let count = n.to_string();
        let mut vars = vec![("n", count.as_str()), ("papers", self.noun(n)?)];
        vars.extend_from_slice(extra);
        self.fill(key, &vars)
    }
}

/// Any relation that can be attached to a recommendation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    Citation(CitationRelation),
    DirectAuthor(DirectAuthorRelation),
    IndirectAuthor(IndirectRelation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageKind {
    Citation,
    DirectAuthor,
    IndirectAuthor,
}

impl Relation {
    pub fn kind(&self) -> MessageKind {
        match self {
            Relation::Citation(_) => MessageKind::Citation,
            Relation::DirectAuthor(_) => MessageKind::DirectAuthor,
            Relation::IndirectAuthor(_) => MessageKind::IndirectAuthor,
        }
    }

    /// Ordering key under the coverage cap: total source counts for citation
    /// and direct author relations, triplet score for indirect ones.
    pub fn strength(&self) -> f64 {
        match self {
            Relation::Citation(r) => f64::from(r.total()),
            Relation::DirectAuthor(r) => f64::from(r.total()),
            Relation::IndirectAuthor(r) => r.triplet.score,
        }
    }

    pub fn paper_id(&self) -> &crate::corpus::PaperId {
        match self {
            Relation::Citation(r) => &r.paper_id,
            Relation::DirectAuthor(r) => &r.paper_id,
            Relation::IndirectAuthor(r) => &r.paper_id,
        }
    }
}

/// Source fragments in display order. When every listed source is present,
/// library and feed collapse into one merged fragment.
fn source_fragments(
    templates: &MessageTemplateSet,
    prefix: &str,
    counts: &BTreeMap<SourceKind, u32>,
    all_sources: &[SourceKind],
    feed_key: &str,
) -> Result<Vec<String>, TemplateError> {
    let merged = all_sources.iter().all(|k| counts.get(k).copied().unwrap_or(0) > 0);
    let mut out = Vec::new();
    for kind in all_sources {
        let Some(&n) = counts.get(kind) else { continue };
        if n == 0 {
            continue;
        }
        let key = match kind {
            SourceKind::Authored => format!("{prefix}.authored"),
            SourceKind::Library if merged => {
                let both = n + counts[&SourceKind::Feed];
                out.push(templates.count_fragment(&format!("{prefix}.library_and_feeds"), both, &[])?);
                continue;
            }
            SourceKind::Feed if merged => continue,
            SourceKind::Library => format!("{prefix}.library"),
            SourceKind::Feed => feed_key.to_owned(),
            SourceKind::Cited => format!("{prefix}.cited"),
        };
        out.push(templates.count_fragment(&key, n, &[])?);
    }
    Ok(out)
}

fn render_citation(r: &CitationRelation, templates: &MessageTemplateSet) -> Result<String, TemplateError> {
    let feed_key = match &r.feed_breakdown {
        Some(b) if b.len() > 1 => "citation.feeds",
        _ => "citation.feed",
    };
    let fragments = source_fragments(
        templates,
        "citation",
        &r.counts,
        &[SourceKind::Authored, SourceKind::Library, SourceKind::Feed],
        feed_key,
    )?;
    templates.fill("citation.message", &[("fragments", &fragments.join(FRAGMENT_SEPARATOR))])
}

fn render_direct(
    r: &DirectAuthorRelation,
    templates: &MessageTemplateSet,
    index: &CorpusIndex,
) -> Result<String, TemplateError> {
    let fragments = source_fragments(templates, "direct", &r.counts, &SourceKind::ALL, "direct.feed")?;
    templates.fill(
        "direct.message",
        &[
            ("author", index.display_name(&r.featured_author)),
            ("fragments", &fragments.join(FRAGMENT_SEPARATOR)),
        ],
    )
}

fn render_indirect(
    r: &IndirectRelation,
    templates: &MessageTemplateSet,
    index: &CorpusIndex,
) -> Result<String, TemplateError> {
    let author = index.display_name(&r.triplet.author_i);
    let indirect = index.display_name(&r.triplet.indirect_j);
    let names = [("author", author), ("indirect", indirect)];
    let line1_key = match r.line1_relation {
        AuthorRelation::Cited => "indirect.line1.cited",
        AuthorRelation::CoAuthored => "indirect.line1.co_authored",
    };
    let line2_key = match r.line2_action {
        EngagementAction::CoAuthored => "indirect.line2.co_authored",
        EngagementAction::Cited => "indirect.line2.cited",
        EngagementAction::Saved => "indirect.line2.saved",
        EngagementAction::MoreLikeThis => "indirect.line2.more_like_this",
    };
    let line1 = templates.count_fragment(line1_key, r.line1_count(), &names)?;
    let line2 = templates.count_fragment(line2_key, r.line2_count, &names)?;
    Ok(format!("{line1}\n{line2}"))
}

/// Renders a relation as message text. Indirect relations produce two lines
/// separated by `\n`.
pub fn render_message(
    relation: &Relation,
    templates: &MessageTemplateSet,
    index: &CorpusIndex,
) -> Result<String, TemplateError> {
    match relation {
        Relation::Citation(r) => render_citation(r, templates),
        Relation::DirectAuthor(r) => render_direct(r, templates, index),
        Relation::IndirectAuthor(r) => render_indirect(r, templates, index),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Author, AuthorId, FeedId, Paper};
    use crate::indirect::Triplet;

    fn names() -> CorpusIndex {
        let authors = [("doe", "John Doe"), ("paules", "Catherine Paules"), ("fauci", "Anthony Fauci")]
            .iter()
            .map(|(id, name)| Author { id: (*id).into(), display_name: (*name).into(), h_index: None })
            .collect();
        let p = Paper {
            id: "P".into(),
            title: "t".into(),
            authors: vec!["doe".into()],
            year: 2020,
            references: Default::default(),
        };
        CorpusIndex::from_records(vec![p], authors).unwrap()
    }

    fn citation(counts: &[(SourceKind, u32)]) -> Relation {
        Relation::Citation(CitationRelation {
            paper_id: "P".into(),
            counts: counts.iter().copied().collect(),
            feed_breakdown: None,
        })
    }

    fn direct(counts: &[(SourceKind, u32)]) -> Relation {
        Relation::DirectAuthor(DirectAuthorRelation {
            paper_id: "P".into(),
            featured_author: "doe".into(),
            counts: counts.iter().copied().collect(),
        })
    }

    fn indirect(line1: AuthorRelation, co: u32, cited: u32, action: EngagementAction, n: u32) -> Relation {
        Relation::IndirectAuthor(IndirectRelation {
            paper_id: "P".into(),
            triplet: Triplet {
                author_i: AuthorId::from("paules"),
                indirect_j: AuthorId::from("fauci"),
                user_u: "u".into(),
                co_authored_ij: co,
                cited_ij: cited,
                engaged_ju: n,
                h_index_j: 30,
                relevance: 1.0,
                influence: 1.0,
                score: 1.0,
            },
            line1_relation: line1,
            line2_action: action,
            line2_count: n,
        })
    }

    #[test]
    fn citation_variants() {
        let idx = names();
        let t = MessageTemplateSet::default();
        let r = |c: &[(SourceKind, u32)]| render_message(&citation(c), &t, &idx).unwrap();
        assert_eq!(r(&[(SourceKind::Library, 2)]), "This paper cites 2 papers in your library");
        assert_eq!(r(&[(SourceKind::Authored, 1)]), "This paper cites 1 paper you authored");
        assert_eq!(
            r(&[(SourceKind::Authored, 1), (SourceKind::Library, 3)]),
            "This paper cites 1 paper you authored, 3 papers in your library"
        );
        assert_eq!(
            r(&[(SourceKind::Authored, 2), (SourceKind::Library, 1), (SourceKind::Feed, 2)]),
            "This paper cites 2 papers you authored, 3 papers in your library and feeds"
        );
        let also = MessageTemplateSet::also_cites();
        assert_eq!(
            render_message(&citation(&[(SourceKind::Library, 2)]), &also, &idx).unwrap(),
            "Also cites: 2 papers in your library"
        );
    }

    #[test]
    fn multiple_feeds_use_plural_phrase() {
        let idx = names();
        let rel = Relation::Citation(CitationRelation {
            paper_id: "P".into(),
            counts: [(SourceKind::Feed, 3)].into(),
            feed_breakdown: Some([(FeedId::from("a"), 1), (FeedId::from("b"), 2)].into()),
        });
        assert_eq!(
            render_message(&rel, &MessageTemplateSet::default(), &idx).unwrap(),
            "This paper cites 3 papers in your feeds"
        );
    }

    #[test]
    fn direct_variants() {
        let idx = names();
        let t = MessageTemplateSet::default();
        let r = |c: &[(SourceKind, u32)]| render_message(&direct(c), &t, &idx).unwrap();
        assert_eq!(r(&[(SourceKind::Cited, 3)]), "John Doe authored 3 papers you cited");
        assert_eq!(r(&[(SourceKind::Authored, 1)]), "John Doe co-authored 1 paper with you");
        assert_eq!(
            r(&[(SourceKind::Feed, 1), (SourceKind::Cited, 2)]),
            "John Doe authored 1 paper in your feed, authored 2 papers you cited"
        );
        assert_eq!(
            r(&[
                (SourceKind::Authored, 1),
                (SourceKind::Library, 1),
                (SourceKind::Feed, 1),
                (SourceKind::Cited, 4)
            ]),
            "John Doe co-authored 1 paper with you, authored 2 papers in your library and feeds, authored 4 papers you cited"
        );
    }

    #[test]
    fn indirect_two_lines() {
        let idx = names();
        let t = MessageTemplateSet::default();
        let msg = render_message(
            &indirect(AuthorRelation::Cited, 0, 4, EngagementAction::Saved, 5),
            &t,
            &idx,
        )
        .unwrap();
        assert_eq!(
            msg,
            "Catherine Paules* has authored 4 papers that Anthony Fauci cited.\n\
             You saved 5 of Anthony Fauci's papers in the library."
        );
        let msg = render_message(
            &indirect(AuthorRelation::CoAuthored, 1, 0, EngagementAction::CoAuthored, 1),
            &t,
            &idx,
        )
        .unwrap();
        assert_eq!(
            msg,
            "Catherine Paules* has co-authored 1 paper with Anthony Fauci.\n\
             You co-authored 1 paper with Anthony Fauci."
        );
    }

    #[test]
    fn counts_are_rendered_verbatim() {
        let idx = names();
        let t = MessageTemplateSet::default();
        for n in [1u32, 2, 17, 1000, u32::MAX] {
            let msg = render_message(&citation(&[(SourceKind::Library, n)]), &t, &idx).unwrap();
            assert!(msg.contains(&format!(" {n} ")), "{msg}");
        }
    }

    #[test]
    fn bad_templates_fail_hard() {
        let idx = names();
        let t = MessageTemplateSet::from_json(r#"{"citation.library": "{n} {pappers} in lib"}"#).unwrap();
        let err = render_message(&citation(&[(SourceKind::Library, 2)]), &t, &idx).unwrap_err();
        assert_eq!(
            err,
            TemplateError::UnknownPlaceholder { key: "citation.library".into(), placeholder: "pappers".into() }
        );
        assert!(matches!(
            MessageTemplateSet::from_json(r#"{"citation.nope": "x"}"#),
            Err(TemplateError::UnknownKey(_))
        ));
        let t = MessageTemplateSet::from_json(r#"{"citation.library": "{n papers"}"#).unwrap();
        assert!(matches!(
            render_message(&citation(&[(SourceKind::Library, 2)]), &t, &idx),
            Err(TemplateError::Unterminated { .. })
        ));
        assert!(matches!(MessageTemplateSet::from_json("[1]"), Err(TemplateError::Parse(_))));
    }

    #[test]
    fn override_applies() {
        let idx = names();
        let t = MessageTemplateSet::from_json(r#"{"citation.message": "Cites {fragments}."}"#).unwrap();
        assert_eq!(
            render_message(&citation(&[(SourceKind::Library, 1)]), &t, &idx).unwrap(),
            "Cites 1 paper in your library."
        );
    }
}
