//! Seeded synthetic corpora, users and email requests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::composer::EmailRequest;
use crate::corpus::{Author, AuthorId, CorpusIndex, Feed, FeedId, Paper, PaperId, Rating, UserProfile};
use crate::rng;

/// Sequential draws from one `(seed, key)` pair.
struct Stream {
    seed: u64,
    key: u64,
    next: u64,
}

impl Stream {
    fn new(seed: u64, label: &str) -> Self {
        Self { seed, key: rng::hash_str(label), next: 0 }
    }

    fn unit(&mut self) -> f64 {
        self.next += 1;
        rng::draw_unit(self.seed, self.key, self.next)
    }

    fn index(&mut self, n: usize) -> usize {
        self.next += 1;
        rng::draw_index(self.seed, self.key, self.next, n)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// `k` distinct indices from `0..n`, sorted.
    fn sample(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        let k = k.min(n);
        for i in 0..k {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        let mut out = pool[..k].to_vec();
        out.sort_unstable();
        out
    }
}

/// Shape of a synthetic world.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub n_authors: usize,
    pub n_papers: usize,
    pub n_users: usize,
    pub max_authors_per_paper: usize,
    /// Chance that a paper cites any given earlier paper.
    pub ref_prob: f64,
    /// Chance that a user saves or rates any given paper.
    pub engage_prob: f64,
    /// Chance that an author record carries an explicit h-index.
    pub explicit_h_prob: f64,
    pub feeds_per_user: usize,
}

impl Default for WorldSpec {
    fn default() -> Self {
        Self {
            n_authors: 8,
            n_papers: 15,
            n_users: 4,
            max_authors_per_paper: 3,
            ref_prob: 0.2,
            engage_prob: 0.2,
            explicit_h_prob: 0.5,
            feeds_per_user: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct World {
    pub index: CorpusIndex,
    pub papers: Vec<Paper>,
    pub authors: Vec<Author>,
    pub users: Vec<UserProfile>,
}

fn author_id(k: usize) -> AuthorId {
    AuthorId::new(format!("A{k:03}"))
}

fn paper_id(k: usize) -> PaperId {
    PaperId::new(format!("P{k:04}"))
}

pub fn random_world(seed: u64, spec: &WorldSpec) -> World {
    let n_authors = spec.n_authors.max(1);
    let mut s = Stream::new(seed, "world");

    let mut papers = Vec::with_capacity(spec.n_papers);
    for k in 0..spec.n_papers {
        let n_auth = 1 + s.index(spec.max_authors_per_paper.clamp(1, n_authors));
        let authors = s.sample(n_authors, n_auth).into_iter().map(author_id).collect();
        let references = (0..k).filter(|_| s.chance(spec.ref_prob)).map(paper_id).collect();
        papers.push(Paper {
            id: paper_id(k),
            title: format!("Synthetic study {k}"),
            authors,
            year: 2000 + (k * 20 / spec.n_papers.max(1)) as i32,
            references,
        });
    }

    let authors: Vec<Author> = (0..n_authors)
        .map(|k| Author {
            id: author_id(k),
            display_name: format!("Author {k}"),
            h_index: s.chance(spec.explicit_h_prob).then(|| 1 + s.index(40) as u32),
        })
        .collect();

    let index = CorpusIndex::from_records(papers.clone(), authors.clone())
        .expect("synthetic records are well formed");

    let mut users = Vec::with_capacity(spec.n_users);
    for u in 0..spec.n_users {
        let mut user = UserProfile::new(format!("U{u:02}"));
        if s.chance(0.5) {
            let a = author_id(s.index(n_authors));
            user.authored = index.papers_by(&a).clone();
            user.author_id = Some(a);
            user.claimed_profile = s.chance(0.5);
            user.h_index = Some(s.index(30) as u32);
        }
        user.library = (0..spec.n_papers)
            .filter(|_| s.chance(spec.engage_prob))
            .map(paper_id)
            .collect();
        for f in 0..spec.feeds_per_user {
            let mut ratings = BTreeMap::new();
            for k in 0..spec.n_papers {
                if s.chance(spec.engage_prob) {
                    let r = if s.chance(0.75) { Rating::Positive } else { Rating::Negative };
                    ratings.insert(paper_id(k), r);
                }
            }
            user.feeds.push(Feed {
                feed_id: FeedId::new(format!("F{f}")),
                name: format!("Feed {f}"),
                ratings,
            });
        }
        users.push(user);
    }

    World { index, papers, authors, users }
}

/// A corpus dense in indirect-author relations, with email requests for
/// every user.
pub fn dense_indirect_fixture(seed: u64) -> (World, Vec<EmailRequest>) {
    let spec = WorldSpec {
        n_authors: 40,
        n_papers: 400,
        n_users: 20,
        max_authors_per_paper: 4,
        ref_prob: 0.03,
        engage_prob: 0.04,
        explicit_h_prob: 1.0,
        feeds_per_user: 1,
    };
    let world = random_world(seed, &spec);
    let requests = email_requests(seed, &world, 5, 6, 14);
    (world, requests)
}

/// `per_user` requests per user, each with a length drawn from
/// `min_len..=max_len` and papers drawn without replacement.
pub fn email_requests(
    seed: u64,
    world: &World,
    per_user: usize,
    min_len: usize,
    max_len: usize,
) -> Vec<EmailRequest> {
    let mut s = Stream::new(seed, "requests");
    let n = world.papers.len();
    let mut out = Vec::new();
    for user in &world.users {
        let feed_id = user
            .feeds
            .first()
            .map(|f| f.feed_id.clone())
            .unwrap_or_else(|| FeedId::new("F0"));
        for d in 0..per_user {
            let len = min_len + s.index(max_len.saturating_sub(min_len) + 1);
            let papers: BTreeSet<usize> = s.sample(n, len).into_iter().collect();
            out.push(EmailRequest {
                user_id: user.id.clone(),
                feed_id: feed_id.clone(),
                date: format!("2021-03-{:02}", d + 1),
                papers: papers.into_iter().map(paper_id).collect(),
            });
        }
    }
    out
}
