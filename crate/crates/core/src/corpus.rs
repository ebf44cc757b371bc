//! Corpus data model, JSONL ingestion and derived indices.
//!
//! A [`CorpusIndex`] is built once and is read-only afterwards. Reference
//! sets may point at papers outside the corpus; such dangling ids are kept
//! but never receive an incoming-citation count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

string_id!(
    /// Opaque paper identifier.
    PaperId
);
string_id!(
    /// Opaque author identifier.
    AuthorId
);
string_id!(
    /// Opaque user identifier.
    UserId
);
string_id!(
    /// Opaque research-feed identifier.
    FeedId
);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: PaperId,
    pub title: String,
    pub authors: Vec<AuthorId>,
    pub year: i32,
    pub references: BTreeSet<PaperId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    pub id: AuthorId,
    pub display_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_index: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rating {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feed {
    pub feed_id: FeedId,
    pub name: String,
    #[serde(default)]
    pub ratings: BTreeMap<PaperId, Rating>,
}

impl Feed {
    /// Papers that count as members of this feed for relevance purposes.
    pub fn member_papers(&self, exclude_negative: bool) -> impl Iterator<Item = &PaperId> {
        self.ratings
            .iter()
            .filter(move |(_, r)| !exclude_negative || **r == Rating::Positive)
            .map(|(p, _)| p)
    }

    /// Papers annotated "more like this".
    pub fn positive_papers(&self) -> impl Iterator<Item = &PaperId> {
        self.member_papers(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub id: UserId,
    /// Author identity of the user in the corpus, if they have one. When
    /// absent, an author whose id equals the user id is assumed to be the
    /// user.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_id: Option<AuthorId>,
    #[serde(default)]
    pub authored: BTreeSet<PaperId>,
    #[serde(default)]
    pub library: BTreeSet<PaperId>,
    #[serde(default)]
    pub feeds: Vec<Feed>,
    #[serde(default)]
    pub claimed_profile: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_index: Option<u32>,
}

impl UserProfile {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: UserId::new(id),
            author_id: None,
            authored: BTreeSet::new(),
            library: BTreeSet::new(),
            feeds: Vec::new(),
            claimed_profile: false,
            h_index: None,
        }
    }

    /// Union of feed member papers across all feeds.
    pub fn feed_papers(&self, exclude_negative: bool) -> BTreeSet<PaperId> {
        self.feeds
            .iter()
            .flat_map(|f| f.member_papers(exclude_negative).cloned())
            .collect()
    }

    pub fn feed(&self, feed_id: &FeedId) -> Option<&Feed> {
        self.feeds.iter().find(|f| &f.feed_id == feed_id)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{source_name} line {line}: {message}")]
    Malformed {
        source_name: &'static str,
        line: usize,
        message: String,
    },
    #[error("{source_name} line {line}: duplicate id `{id}`")]
    Duplicate {
        source_name: &'static str,
        line: usize,
        id: String,
    },
    #[error("reading {source_name}: {err}")]
    Io {
        source_name: &'static str,
        #[source]
        err: std::io::Error,
    },
}

impl CorpusError {
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::Malformed { line, .. } | Self::Duplicate { line, .. } => Some(*line),
            Self::Io { .. } => None,
        }
    }
}

/// Immutable corpus with derived lookups.
#[derive(Clone, Debug, Default)]
pub struct CorpusIndex {
    papers: BTreeMap<PaperId, Paper>,
    authors: BTreeMap<AuthorId, Author>,
    by_author: BTreeMap<AuthorId, BTreeSet<PaperId>>,
    incoming_citations: BTreeMap<PaperId, u32>,
    cited_by_author: BTreeMap<AuthorId, BTreeSet<PaperId>>,
    h_index: BTreeMap<AuthorId, u32>,
}

impl CorpusIndex {
    /// Builds an index from already-parsed records.
    pub fn from_records(papers: Vec<Paper>, authors: Vec<Author>) -> Result<Self, CorpusError> {
        let mut index = CorpusIndex::default();
        for (n, paper) in papers.into_iter().enumerate() {
            index.insert_paper(paper, "papers", n + 1)?;
        }
        for (n, author) in authors.into_iter().enumerate() {
            index.insert_author(author, "authors", n + 1)?;
        }
        index.finish();
        Ok(index)
    }

    fn insert_paper(
        &mut self,
        mut paper: Paper,
        source_name: &'static str,
        line: usize,
    ) -> Result<(), CorpusError> {
        if paper.authors.is_empty() {
            return Err(CorpusError::Malformed {
                source_name,
                line,
                message: format!("paper `{}` has no authors", paper.id),
            });
        }
        if self.papers.contains_key(&paper.id) {
            return Err(CorpusError::Duplicate {
                source_name,
                line,
                id: paper.id.0,
            });
        }
        // A self-citation in the raw metadata is dropped rather than rejected.
        paper.references.remove(&paper.id);
        self.papers.insert(paper.id.clone(), paper);
        Ok(())
    }

    fn insert_author(
        &mut self,
        author: Author,
        source_name: &'static str,
        line: usize,
    ) -> Result<(), CorpusError> {
        if self.authors.contains_key(&author.id) {
            return Err(CorpusError::Duplicate {
                source_name,
                line,
                id: author.id.0,
            });
        }
        self.authors.insert(author.id.clone(), author);
        Ok(())
    }

    fn finish(&mut self) {
        for paper in self.papers.values() {
            for a in &paper.authors {
                self.by_author
                    .entry(a.clone())
                    .or_default()
                    .insert(paper.id.clone());
            }
            for r in &paper.references {
                if self.papers.contains_key(r) {
                    *self.incoming_citations.entry(r.clone()).or_insert(0) += 1;
                    for a in &paper.authors {
                        self.cited_by_author
                            .entry(a.clone())
                            .or_default()
                            .insert(r.clone());
                    }
                }
            }
        }
        let mut h = BTreeMap::new();
        for (author, papers) in &self.by_author {
            let supplied = self.authors.get(author).and_then(|a| a.h_index);
            let value = supplied.unwrap_or_else(|| {
                let counts: Vec<u32> = papers.iter().map(|p| self.citations_of(p)).collect();
                compute_h_index(&counts)
            });
            h.insert(author.clone(), value);
        }
        for author in self.authors.values() {
            if let Some(v) = author.h_index {
                h.entry(author.id.clone()).or_insert(v);
            }
        }
        self.h_index = h;
    }

    pub fn paper(&self, id: &PaperId) -> Option<&Paper> {
        self.papers.get(id)
    }

    pub fn papers(&self) -> impl Iterator<Item = &Paper> {
        self.papers.values()
    }

    pub fn author(&self, id: &AuthorId) -> Option<&Author> {
        self.authors.get(id)
    }

    pub fn authors(&self) -> impl Iterator<Item = &Author> {
        self.authors.values()
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn author_count(&self) -> usize {
        self.authors.len()
    }

    /// Display name for an author, falling back to the raw id.
    pub fn display_name<'a>(&'a self, id: &'a AuthorId) -> &'a str {
        self.authors
            .get(id)
            .map(|a| a.display_name.as_str())
            .unwrap_or(id.as_str())
    }

    /// Papers listing `author` on their byline. Empty for unknown authors.
    pub fn papers_by(&self, author: &AuthorId) -> &BTreeSet<PaperId> {
        static EMPTY: BTreeSet<PaperId> = BTreeSet::new();
        self.by_author.get(author).unwrap_or(&EMPTY)
    }

    /// Corpus papers referenced by any paper of `author`.
    pub fn papers_cited_by(&self, author: &AuthorId) -> &BTreeSet<PaperId> {
        static EMPTY: BTreeSet<PaperId> = BTreeSet::new();
        self.cited_by_author.get(author).unwrap_or(&EMPTY)
    }

    /// Authors that appear on at least one paper, in id order.
    pub fn publishing_authors(&self) -> impl Iterator<Item = &AuthorId> {
        self.by_author.keys()
    }

    /// Number of distinct corpus papers citing `paper`.
    pub fn citations_of(&self, paper: &PaperId) -> u32 {
        self.incoming_citations.get(paper).copied().unwrap_or(0)
    }

    pub fn incoming_citations(&self) -> &BTreeMap<PaperId, u32> {
        &self.incoming_citations
    }

    /// Supplied h-index if the author record carries one, otherwise the value
    /// recomputed from incoming citations within the corpus.
    pub fn h_index(&self, author: &AuthorId) -> u32 {
        self.h_index.get(author).copied().unwrap_or(0)
    }

    /// Corpus author id that stands for `user`, if any.
    pub fn user_author_id(&self, user: &UserProfile) -> Option<AuthorId> {
        match &user.author_id {
            Some(a) => Some(a.clone()),
            None => {
                let candidate = AuthorId::new(user.id.as_str());
                (self.authors.contains_key(&candidate) || self.by_author.contains_key(&candidate))
                    .then_some(candidate)
            }
        }
    }
}

fn parse_lines<T, R>(reader: R, source_name: &'static str) -> Result<Vec<(usize, T)>, CorpusError>
where
    T: serde::de::DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|err| CorpusError::Io { source_name, err })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let record = serde_json::from_str(trimmed).map_err(|e| CorpusError::Malformed {
            source_name,
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, record));
    }
    Ok(out)
}

/// Parses `papers.jsonl` and `authors.jsonl` streams into an index.
pub fn ingest_corpus<P: BufRead, A: BufRead>(
    papers: P,
    authors: A,
) -> Result<CorpusIndex, CorpusError> {
    let mut index = CorpusIndex::default();
    for (line, paper) in parse_lines::<Paper, _>(papers, "papers")? {
        index.insert_paper(paper, "papers", line)?;
    }
    for (line, author) in parse_lines::<Author, _>(authors, "authors")? {
        index.insert_author(author, "authors", line)?;
    }
    index.finish();
    Ok(index)
}

/// Parses a `users.jsonl` stream.
pub fn ingest_users<R: BufRead>(users: R) -> Result<Vec<UserProfile>, CorpusError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (line, user) in parse_lines::<UserProfile, _>(users, "users")? {
        if !seen.insert(user.id.clone()) {
            return Err(CorpusError::Duplicate {
                source_name: "users",
                line,
                id: user.id.0,
            });
        }
        for feed in &user.feeds {
            if user.feeds.iter().filter(|f| f.feed_id == feed.feed_id).count() > 1 {
                return Err(CorpusError::Malformed {
                    source_name: "users",
                    line,
                    message: format!("feed `{}` listed twice", feed.feed_id),
                });
            }
        }
        out.push(user);
    }
    Ok(out)
}

/// Papers cited by the user's own papers, minus those papers themselves.
/// Authored ids missing from the index are skipped.
pub fn user_cited_set(user: &UserProfile, index: &CorpusIndex) -> BTreeSet<PaperId> {
    user.authored
        .iter()
        .filter_map(|p| index.paper(p))
        .flat_map(|p| p.references.iter())
        .filter(|r| !user.authored.contains(*r))
        .cloned()
        .collect()
}

/// Largest `h` such that at least `h` of the counts are `>= h`.
pub fn compute_h_index(citation_counts: &[u32]) -> u32 {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|(i, &c)| c as usize > *i)
        .count() as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper(id: &str, authors: &[&str], refs: &[&str]) -> Paper {
        Paper {
            id: id.into(),
            title: format!("Title {id}"),
            authors: authors.iter().map(|a| AuthorId::from(*a)).collect(),
            year: 2020,
            references: refs.iter().map(|r| PaperId::from(*r)).collect(),
        }
    }

    #[test]
    fn counts_incoming_citations() {
        let idx = CorpusIndex::from_records(
            vec![
                paper("P1", &["A"], &[]),
                paper("P2", &["B"], &["P1"]),
                paper("P3", &["B"], &["P1"]),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(idx.citations_of(&"P1".into()), 2);
        assert_eq!(idx.papers_by(&"B".into()).len(), 2);
    }

    #[test]
    fn empty_streams() {
        let idx = ingest_corpus(&b""[..], &b""[..]).unwrap();
        assert_eq!(idx.paper_count(), 0);
        assert_eq!(idx.author_count(), 0);
        assert!(idx.incoming_citations().is_empty());
    }

    #[test]
    fn dangling_reference_is_kept() {
        let idx = CorpusIndex::from_records(vec![paper("P", &["A"], &["Q"])], vec![]).unwrap();
        assert!(idx.paper(&"P".into()).unwrap().references.contains(&PaperId::from("Q")));
        assert!(!idx.incoming_citations().contains_key(&PaperId::from("Q")));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let papers = "{\"id\":\"P1\",\"title\":\"t\",\"authors\":[\"A\"],\"year\":2020,\"references\":[]}\n\nnot json\n";
        let err = ingest_corpus(papers.as_bytes(), &b""[..]).unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn duplicate_paper_rejected() {
        let line = "{\"id\":\"P1\",\"title\":\"t\",\"authors\":[\"A\"],\"year\":2020,\"references\":[]}\n";
        let err = ingest_corpus(format!("{line}{line}").as_bytes(), &b""[..]).unwrap_err();
        assert!(matches!(err, CorpusError::Duplicate { line: 2, .. }));
    }

    #[test]
    fn paper_without_authors_rejected() {
        let line = "{\"id\":\"P1\",\"title\":\"t\",\"authors\":[],\"year\":2020,\"references\":[]}\n";
        assert!(ingest_corpus(line.as_bytes(), &b""[..]).is_err());
    }

    #[test]
    fn self_reference_dropped() {
        let idx = CorpusIndex::from_records(vec![paper("P", &["A"], &["P", "Q"])], vec![]).unwrap();
        assert_eq!(idx.paper(&"P".into()).unwrap().references.len(), 1);
        assert_eq!(idx.citations_of(&"P".into()), 0);
    }

    #[test]
    fn supplied_h_index_is_trusted() {
        let idx = CorpusIndex::from_records(
            vec![paper("P1", &["A"], &[]), paper("P2", &["B"], &["P1"])],
            vec![
                Author { id: "A".into(), display_name: "Ann".into(), h_index: Some(40) },
                Author { id: "B".into(), display_name: "Bob".into(), h_index: None },
            ],
        )
        .unwrap();
        assert_eq!(idx.h_index(&"A".into()), 40);
        assert_eq!(idx.h_index(&"B".into()), 0);
    }

    #[test]
    fn recomputed_h_index() {
        let idx = CorpusIndex::from_records(
            vec![
                paper("P1", &["A"], &[]),
                paper("P2", &["A"], &["P1"]),
                paper("P3", &["B"], &["P1", "P2"]),
            ],
            vec![],
        )
        .unwrap();
        // P1 cited twice, P2 once.
        assert_eq!(idx.h_index(&"A".into()), 1);
    }

    #[test]
    fn cited_set_examples() {
        let idx = CorpusIndex::from_records(
            vec![paper("P1", &["U"], &["P2", "P5"]), paper("P2", &["U"], &["P6"])],
            vec![],
        )
        .unwrap();
        let mut u = UserProfile::new("u");
        assert!(user_cited_set(&u, &idx).is_empty());

        u.authored = ["P1"].iter().map(|s| PaperId::from(*s)).collect();
        let got: Vec<_> = user_cited_set(&u, &idx).into_iter().collect();
        assert_eq!(got, vec![PaperId::from("P2"), PaperId::from("P5")]);

        u.authored.insert("P2".into());
        u.authored.insert("missing".into());
        let got: Vec<_> = user_cited_set(&u, &idx).into_iter().collect();
        assert_eq!(got, vec![PaperId::from("P5"), PaperId::from("P6")]);
    }

    #[test]
    fn h_index_examples() {
        assert_eq!(compute_h_index(&[10, 8, 5, 4, 3]), 4);
        assert_eq!(compute_h_index(&[]), 0);
        assert_eq!(compute_h_index(&[0, 0]), 0);
        assert_eq!(compute_h_index(&[100]), 1);
    }

    fn brute_h(counts: &[u32]) -> u32 {
        (0..=counts.len() as u32)
            .filter(|&h| counts.iter().filter(|&&c| c >= h).count() as u32 >= h)
            .max()
            .unwrap()
    }

    proptest! {
        #[test]
        fn h_index_matches_scan(counts in proptest::collection::vec(0u32..30, 0..20)) {
            prop_assert_eq!(compute_h_index(&counts), brute_h(&counts));
        }

        #[test]
        fn h_index_permutation_and_monotone(
            counts in proptest::collection::vec(0u32..30, 1..20),
            idx in any::<prop::sample::Index>(),
            bump in 1u32..10,
        ) {
            let mut rev = counts.clone();
            rev.reverse();
            prop_assert_eq!(compute_h_index(&counts), compute_h_index(&rev));
            let mut bumped = counts.clone();
            let i = idx.index(bumped.len());
            bumped[i] += bump;
            prop_assert!(compute_h_index(&bumped) >= compute_h_index(&counts));
        }
    }
}
