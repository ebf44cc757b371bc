//! Brute-force reference implementations written directly from the
//! definitions, sharing no code with the library beyond its data types.

use std::collections::{BTreeMap, BTreeSet};

use scholrel::corpus::{Author, Paper, UserProfile};

pub struct Raw {
    pub papers: BTreeMap<String, Paper>,
    pub h: BTreeMap<String, u32>,
    pub known_authors: BTreeSet<String>,
}

pub fn brute_h(counts: &[u32]) -> u32 {
    let mut best = 0;
    for h in 0..=counts.len() as u32 {
        if counts.iter().filter(|c| **c >= h).count() as u32 >= h {
            best = h;
        }
    }
    best
}

impl Raw {
    pub fn new(papers: &[Paper], authors: &[Author]) -> Self {
        let papers: BTreeMap<String, Paper> =
            papers.iter().map(|p| (p.id.as_str().to_owned(), p.clone())).collect();
        let mut known_authors: BTreeSet<String> =
            authors.iter().map(|a| a.id.as_str().to_owned()).collect();
        for p in papers.values() {
            known_authors.extend(p.authors.iter().map(|a| a.as_str().to_owned()));
        }
        let mut h = BTreeMap::new();
        for a in &known_authors {
            let supplied = authors
                .iter()
                .find(|x| x.id.as_str() == a)
                .and_then(|x| x.h_index);
            let value = supplied.unwrap_or_else(|| {
                let counts: Vec<u32> = papers
                    .values()
                    .filter(|p| p.authors.iter().any(|x| x.as_str() == a))
                    .map(|p| {
                        papers
                            .values()
                            .filter(|q| q.id != p.id && q.references.contains(&p.id))
                            .count() as u32
                    })
                    .collect();
                brute_h(&counts)
            });
            h.insert(a.clone(), value);
        }
        Self { papers, h, known_authors }
    }

    pub fn papers_of(&self, author: &str) -> BTreeSet<String> {
        self.papers
            .values()
            .filter(|p| p.authors.iter().any(|a| a.as_str() == author))
            .map(|p| p.id.as_str().to_owned())
            .collect()
    }

    pub fn user_author(&self, u: &UserProfile) -> Option<String> {
        match &u.author_id {
            Some(a) => Some(a.as_str().to_owned()),
            None => self
                .known_authors
                .contains(u.id.as_str())
                .then(|| u.id.as_str().to_owned()),
        }
    }
}

pub struct Sources {
    pub authored: BTreeSet<String>,
    pub library: BTreeSet<String>,
    pub feed: BTreeSet<String>,
    pub positive_feed: BTreeSet<String>,
    pub cited: BTreeSet<String>,
}

pub fn sources(raw: &Raw, u: &UserProfile) -> Sources {
    let s = |xs: &BTreeSet<scholrel::PaperId>| xs.iter().map(|p| p.as_str().to_owned()).collect::<BTreeSet<_>>();
    let authored = s(&u.authored);
    let mut feed = BTreeSet::new();
    let mut positive_feed = BTreeSet::new();
    for f in &u.feeds {
        for (p, r) in &f.ratings {
            feed.insert(p.as_str().to_owned());
            if *r == scholrel::Rating::Positive {
                positive_feed.insert(p.as_str().to_owned());
            }
        }
    }
    let mut cited = BTreeSet::new();
    for a in &authored {
        if let Some(p) = raw.papers.get(a) {
            for r in &p.references {
                if !authored.contains(r.as_str()) {
                    cited.insert(r.as_str().to_owned());
                }
            }
        }
    }
    Sources { authored, library: s(&u.library), feed, positive_feed, cited }
}

/// Citation counts `[authored, library, feed]` and per-feed counts.
pub fn citation_counts(raw: &Raw, u: &UserProfile, paper: &str) -> ([u32; 3], BTreeMap<String, u32>) {
    let src = sources(raw, u);
    let refs: BTreeSet<String> = raw.papers[paper]
        .references
        .iter()
        .map(|r| r.as_str().to_owned())
        .filter(|r| r != paper)
        .collect();
    let n = |set: &BTreeSet<String>| refs.intersection(set).count() as u32;
    let mut per_feed = BTreeMap::new();
    for f in &u.feeds {
        let members: BTreeSet<String> = f.ratings.keys().map(|p| p.as_str().to_owned()).collect();
        let c = n(&members);
        if c > 0 {
            per_feed.insert(f.feed_id.as_str().to_owned(), c);
        }
    }
    ([n(&src.authored), n(&src.library), n(&src.feed)], per_feed)
}

/// Per-author counts `[authored, library, feed, cited]` for each eligible
/// author of `paper`.
pub fn direct_counts(raw: &Raw, u: &UserProfile, paper: &str) -> BTreeMap<String, [u32; 4]> {
    let src = sources(raw, u);
    let me = raw.user_author(u);
    let mut out = BTreeMap::new();
    for a in &raw.papers[paper].authors {
        let a = a.as_str().to_owned();
        if Some(&a) == me.as_ref() {
            continue;
        }
        let mine: BTreeSet<String> = raw.papers_of(&a).into_iter().filter(|p| p != paper).collect();
        let n = |set: &BTreeSet<String>| mine.intersection(set).count() as u32;
        out.insert(a, [n(&src.authored), n(&src.library), n(&src.feed), n(&src.cited)]);
    }
    out
}

/// Engagement `[co_authored, cited, saved, more_like_this]` per candidate.
pub fn candidates(raw: &Raw, u: &UserProfile) -> BTreeMap<String, [u32; 4]> {
    let src = sources(raw, u);
    let me = raw.user_author(u);
    let mut out = BTreeMap::new();
    for a in &raw.known_authors {
        if Some(a) == me.as_ref() {
            continue;
        }
        let mine = raw.papers_of(a);
        let n = |set: &BTreeSet<String>| mine.intersection(set).count() as u32;
        let e = [n(&src.authored), n(&src.cited), n(&src.library), n(&src.positive_feed)];
        if e.iter().sum::<u32>() > 0 {
            out.insert(a.clone(), e);
        }
    }
    out
}

pub fn pair_counts(raw: &Raw, i: &str, j: &str) -> (u32, u32) {
    let pi = raw.papers_of(i);
    let pj = raw.papers_of(j);
    let co = pi.intersection(&pj).count() as u32;
    let cited = pi
        .iter()
        .filter(|p| pj.iter().any(|q| raw.papers[q].references.iter().any(|r| r.as_str() == p.as_str())))
        .count() as u32;
    (co, cited)
}

pub struct BruteBest {
    pub i: String,
    pub j: String,
    pub score: f64,
}

/// Exhaustive argmax over `(i, j)`; ties within a relative 1e-12 go to the
/// lexicographically smallest pair.
pub fn brute_indirect(raw: &Raw, u: &UserProfile, paper: &str, a: f64, b: f64, base: f64) -> Option<BruteBest> {
    let log = |x: f64| x.ln() / base.ln();
    let cands = candidates(raw, u);
    let me = raw.user_author(u);
    let on_paper: BTreeSet<String> = raw.papers[paper].authors.iter().map(|x| x.as_str().to_owned()).collect();
    let mut all = Vec::new();
    for i in &on_paper {
        for (j, e) in &cands {
            if on_paper.contains(j) || Some(j) == me.as_ref() {
                continue;
            }
            let (co, cited) = pair_counts(raw, i, j);
            let engaged: u32 = e.iter().sum();
            let rel = a * log(f64::from(co) + 1.0) + b * log(f64::from(cited) + 1.0);
            let inf = log(f64::from(engaged)) * f64::from(raw.h[j]);
            let score = rel * inf;
            if score > 0.0 {
                all.push((i.clone(), j.clone(), score));
            }
        }
    }
    let max = all.iter().map(|x| x.2).fold(f64::NEG_INFINITY, f64::max);
    all.into_iter()
        .filter(|x| (max - x.2).abs() <= 1e-12 * max)
        .min_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)))
        .map(|(i, j, score)| BruteBest { i, j, score })
}
