//! Engagement log records and per-condition aggregation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::composer::Condition;

/// One delivered email and how the recipient responded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngagementRecord {
    pub email_id: String,
    pub user_id: String,
    pub condition: Condition,
    pub early: bool,
    pub opened: bool,
    /// Counted as 0 for unopened emails.
    pub clicked: bool,
    pub pct_featured: f64,
    pub n_papers: u32,
    #[serde(default)]
    pub max_author_h: Option<u32>,
    #[serde(default)]
    pub mean_author_h: Option<f64>,
}

impl EngagementRecord {
    pub fn message_count(&self) -> f64 {
        (self.pct_featured * f64::from(self.n_papers)).round()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub n_emails: u64,
    pub open_rate: f64,
    pub ctr: f64,
    pub mean_messages: f64,
    pub mean_pct_featured: f64,
    /// Emails carrying at least one message.
    pub emails_with_message: u64,
}

/// Running sums; merging two accumulators is associative.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SummaryAccumulator {
    n: u64,
    opened: u64,
    clicked: u64,
    messages: f64,
    pct: f64,
    with_message: u64,
}

impl SummaryAccumulator {
    pub fn push(&mut self, r: &EngagementRecord) {
        let m = r.message_count();
        self.n += 1;
        self.opened += u64::from(r.opened);
        self.clicked += u64::from(r.clicked && r.opened);
        self.messages += m;
        self.pct += r.pct_featured;
        self.with_message += u64::from(m > 0.0);
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.n += other.n;
        self.opened += other.opened;
        self.clicked += other.clicked;
        self.messages += other.messages;
        self.pct += other.pct;
        self.with_message += other.with_message;
        self
    }

    pub fn finish(&self) -> Option<ConditionSummary> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        Some(ConditionSummary {
            n_emails: self.n,
            open_rate: self.opened as f64 / n,
            ctr: self.clicked as f64 / n,
            mean_messages: self.messages / n,
            mean_pct_featured: self.pct / n,
            emails_with_message: self.with_message,
        })
    }
}

/// Per-condition rates. Conditions without emails are omitted.
pub fn engagement_summary(logs: &[EngagementRecord]) -> BTreeMap<Condition, ConditionSummary> {
    let mut acc: BTreeMap<Condition, SummaryAccumulator> = BTreeMap::new();
    for r in logs {
        acc.entry(r.condition).or_default().push(r);
    }
    acc.into_iter()
        .filter_map(|(c, a)| a.finish().map(|s| (c, s)))
        .collect()
}

pub fn summary_csv(summary: &BTreeMap<Condition, ConditionSummary>) -> String {
    let mut out = String::from(
        "condition,n_emails,open_rate,ctr,mean_messages,mean_pct_featured,emails_with_message\n",
    );
    for (c, s) in summary {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{}",
            c, s.n_emails, s.open_rate, s.ctr, s.mean_messages, s.mean_pct_featured, s.emails_with_message
        );
    }
    out
}

pub fn summary_text(summary: &BTreeMap<Condition, ConditionSummary>) -> String {
    if summary.is_empty() {
        return "no emails in log\n".to_owned();
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>8} {:>9} {:>8} {:>10} {:>10} {:>10}",
        "condition", "emails", "open rate", "ctr", "msgs/email", "% featured", "w/ message"
    );
    for (c, s) in summary {
        let _ = writeln!(
            out,
            "{:<16} {:>8} {:>9.4} {:>8.4} {:>10.3} {:>10.3} {:>10}",
            c.as_str(),
            s.n_emails,
            s.open_rate,
            s.ctr,
            s.mean_messages,
            s.mean_pct_featured,
            s.emails_with_message
        );
    }
    out
}
