//! Seeded synthetic engagement.
//!
//! Opens are Bernoulli draws with the difference-in-differences cell
//! probability; clicks are Bernoulli draws with the logit CTR, and only
//! opened emails can be clicked. Every draw is keyed by `(seed, email id,
//! stream)`, so output does not depend on the order emails are processed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::did::{Cell, DiDCoefficients};
use crate::analytics::engagement::EngagementRecord;
use crate::analytics::fairness::{aggregate_h, Aggregation};
use crate::analytics::logit::{predict_ctr, ModelCoefficients};
use crate::composer::{AlertEmail, Condition};
use crate::corpus::{CorpusIndex, UserProfile};
use crate::rng;
use crate::templates::MessageKind;

const STREAM_EARLY: u64 = 0;
const STREAM_OPEN: u64 = 1;
const STREAM_CLICK: u64 = 2;
const STREAM_PICK: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    #[serde(default = "default_users")]
    pub n_users: u32,
    #[serde(default = "default_emails_per_user")]
    pub emails_per_user: u32,
    #[serde(default = "default_early_fraction")]
    pub early_fraction: f64,
    pub open_model: DiDCoefficients,
    pub click_model: ModelCoefficients,
    /// Clicked paper drawn with weight `max_author_h ^ bias`; uniform when absent.
    #[serde(default)]
    pub clicked_h_bias: Option<f64>,
}

fn default_users() -> u32 {
    100
}
fn default_emails_per_user() -> u32 {
    10
}
fn default_early_fraction() -> f64 {
    0.5
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("open model implies a probability outside [0, 1] in the {0} cell")]
    OpenProbability(&'static str),
    #[error("click model coefficients must be finite")]
    ClickModel,
    #[error("early_fraction must lie in [0, 1], got {0}")]
    EarlyFraction(f64),
    #[error("clicked_h_bias must be finite and non-negative, got {0}")]
    Bias(f64),
    #[error("duplicate email id `{0}`")]
    DuplicateEmail(String),
    #[error("invalid simulator config: {0}")]
    Parse(String),
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        for cell in Cell::ALL {
            let p = self.open_model.cell_probability(cell);
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(SimError::OpenProbability(cell.name()));
            }
        }
        if !self.click_model.is_finite() {
            return Err(SimError::ClickModel);
        }
        if !(0.0..=1.0).contains(&self.early_fraction) {
            return Err(SimError::EarlyFraction(self.early_fraction));
        }
        if let Some(b) = self.clicked_h_bias {
            if !(b.is_finite() && b >= 0.0) {
                return Err(SimError::Bias(b));
            }
        }
        Ok(())
    }

    /// Parses and validates a JSON config.
    pub fn from_json(json: &str) -> Result<Self, SimError> {
        let cfg: SimConfig = serde_json::from_str(json).map_err(|e| SimError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Per-paper metadata needed downstream of generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecMeta {
    pub paper_id: String,
    pub featured: bool,
    /// h-index of each author, `None` where unknown.
    pub author_h: Vec<Option<u32>>,
}

/// Email-level metadata: what the simulator and the analyses consume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmailMeta {
    pub email_id: String,
    pub user_id: String,
    pub feed_id: String,
    pub date: String,
    pub condition: Condition,
    pub n_papers: u32,
    pub n_messages: u32,
    pub pct_featured: f64,
    pub message_kinds: Vec<MessageKind>,
    #[serde(default)]
    pub claimed_profile: bool,
    #[serde(default)]
    pub receiver_h_norm: f64,
    #[serde(default)]
    pub n_papers_norm: f64,
    /// Fixed exposure period; drawn from `early_fraction` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early: Option<bool>,
    #[serde(default)]
    pub recs: Vec<RecMeta>,
}

/// Divisors used to normalise covariates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub avg_h_index: f64,
    pub avg_email_length: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Self {
            avg_h_index: 10.0,
            avg_email_length: 20.0,
        }
    }
}

impl EmailMeta {
    pub fn from_email(
        email: &AlertEmail,
        index: &CorpusIndex,
        user: Option<&UserProfile>,
        norm: Normalization,
    ) -> Self {
        let recs: Vec<RecMeta> = email
            .recommendations
            .iter()
            .map(|r| RecMeta {
                paper_id: r.paper_id.to_string(),
                featured: r.message.is_some(),
                author_h: index
                    .paper(&r.paper_id)
                    .map(|p| p.authors.iter().map(|a| Some(index.h_index(a))).collect())
                    .unwrap_or_default(),
            })
            .collect();
        let n_papers = email.recommendations.len() as u32;
        Self {
            email_id: email.email_id(),
            user_id: email.user_id.to_string(),
            feed_id: email.feed_id.to_string(),
            date: email.date.clone(),
            condition: email.condition,
            n_papers,
            n_messages: email.message_count() as u32,
            pct_featured: email.pct_featured(),
            message_kinds: email.message_kinds().into_iter().collect(),
            claimed_profile: user.map(|u| u.claimed_profile).unwrap_or(false),
            receiver_h_norm: user
                .and_then(|u| u.h_index)
                .map(|h| f64::from(h) / norm.avg_h_index)
                .unwrap_or(0.0),
            n_papers_norm: f64::from(n_papers) / norm.avg_email_length,
            early: None,
            recs,
        }
    }
}

fn pick_clicked(seed: u64, key: u64, recs: &[RecMeta], bias: Option<f64>) -> Option<&RecMeta> {
    if recs.is_empty() {
        return None;
    }
    let u = rng::draw_unit(seed, key, STREAM_PICK);
    if let Some(bias) = bias {
        let weights: Vec<f64> = recs
            .iter()
            .map(|r| aggregate_h(&r.author_h, Aggregation::Max).map_or(0.0, |h| h.powf(bias)))
            .collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 && total.is_finite() {
            let target = u * total;
            let mut acc = 0.0;
            for (r, w) in recs.iter().zip(&weights) {
                acc += w;
                if target < acc {
                    return Some(r);
                }
            }
            return recs.iter().zip(&weights).rev().find(|(_, w)| **w > 0.0).map(|(r, _)| r);
        }
    }
    let i = ((u * recs.len() as f64) as usize).min(recs.len() - 1);
    Some(&recs[i])
}

pub fn simulate(config: &SimConfig, emails: &[EmailMeta]) -> Result<Vec<EngagementRecord>, SimError> {
    config.validate()?;
    let mut seen = BTreeSet::new();
    for e in emails {
        if !seen.insert(e.email_id.as_str()) {
            return Err(SimError::DuplicateEmail(e.email_id.clone()));
        }
    }
    Ok(emails.iter().map(|e| simulate_one(config, e)).collect())
}

fn simulate_one(config: &SimConfig, email: &EmailMeta) -> EngagementRecord {
    let seed = config.seed;
    let key = rng::hash_str(&email.email_id);
    let early = email
        .early
        .unwrap_or_else(|| rng::draw_unit(seed, key, STREAM_EARLY) < config.early_fraction);
    let cell = Cell {
        early,
        treated: email.condition != Condition::Control,
    };
    let p_open = config.open_model.cell_probability(cell);
    let opened = rng::draw_unit(seed, key, STREAM_OPEN) < p_open;
    let p_click = predict_ctr(
        &config.click_model,
        email.pct_featured,
        email.n_papers_norm,
        email.claimed_profile,
        email.receiver_h_norm,
    );
    let clicked = opened && rng::draw_unit(seed, key, STREAM_CLICK) < p_click;
    let chosen = if clicked {
        pick_clicked(seed, key, &email.recs, config.clicked_h_bias)
    } else {
        None
    };
    EngagementRecord {
        email_id: email.email_id.clone(),
        user_id: email.user_id.clone(),
        condition: email.condition,
        early,
        opened,
        clicked,
        pct_featured: email.pct_featured,
        n_papers: email.n_papers,
        max_author_h: chosen
            .and_then(|r| aggregate_h(&r.author_h, Aggregation::Max))
            .map(|h| h as u32),
        mean_author_h: chosen.and_then(|r| aggregate_h(&r.author_h, Aggregation::Mean)),
    }
}

/// Synthetic emails for desk studies: `n_users × emails_per_user` emails per
/// condition, each with `papers_per_email` papers whose author h-indices are
/// drawn from a skewed distribution on `0..=max_h`.
pub fn synthetic_emails(
    config: &SimConfig,
    conditions: &[Condition],
    papers_per_email: u32,
    max_h: u32,
) -> Vec<EmailMeta> {
    let mut out = Vec::new();
    for cond in conditions {
        for u in 0..config.n_users {
            for e in 0..config.emails_per_user {
                let email_id = format!("{cond}-u{u}-e{e}");
                let key = rng::hash_str(&email_id);
                let recs: Vec<RecMeta> = (0..papers_per_email)
                    .map(|p| {
                        let pk = rng::mix64(key ^ u64::from(p).wrapping_mul(0x9E37_79B9));
                        let n_auth = 1 + rng::draw_index(config.seed, pk, 10, 4);
                        let author_h = (0..n_auth)
                            .map(|a| {
                                let v = rng::draw_unit(config.seed, pk, 11 + a as u64);
                                Some((v * v * f64::from(max_h + 1)).floor() as u32)
                            })
                            .collect();
                        RecMeta {
                            paper_id: format!("{email_id}-p{p}"),
                            featured: false,
                            author_h,
                        }
                    })
                    .collect();
                out.push(EmailMeta {
                    email_id,
                    user_id: format!("u{u}"),
                    feed_id: "f0".into(),
                    date: format!("e{e}"),
                    condition: *cond,
                    n_papers: papers_per_email,
                    n_messages: 0,
                    pct_featured: 0.0,
                    message_kinds: Vec::new(),
                    claimed_profile: false,
                    receiver_h_norm: 0.0,
                    n_papers_norm: 0.0,
                    early: None,
                    recs,
                });
            }
        }
    }
    out
}
