#![allow(dead_code)]

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

pub mod oracle;

use scholrel::{ingest_corpus, ingest_users, CorpusIndex, EmailRequest, UserProfile};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn open(name: &str) -> BufReader<File> {
    BufReader::new(File::open(data_dir().join("demo").join(name)).unwrap())
}

pub struct Demo {
    pub index: CorpusIndex,
    pub users: Vec<UserProfile>,
    pub requests: Vec<EmailRequest>,
}

impl Demo {
    pub fn user(&self, id: &str) -> &UserProfile {
        self.users.iter().find(|u| u.id.as_str() == id).unwrap()
    }
}

pub fn demo() -> Demo {
    let index = ingest_corpus(open("papers.jsonl"), open("authors.jsonl")).unwrap();
    let users = ingest_users(open("users.jsonl")).unwrap();
    let requests = open("recs.jsonl")
        .lines()
        .map(|l| serde_json::from_str(&l.unwrap()).unwrap())
        .collect();
    Demo { index, users, requests }
}
