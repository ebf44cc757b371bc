//! Run configuration: an optional JSON file named by `SCHOLREL_CONFIG`,
//! overridden field by field by command-line flags.

use std::path::{Path, PathBuf};

use scholrel::simulator::Normalization;
use scholrel::{Condition, ScoringParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CONFIG_ENV: &str = "SCHOLREL_CONFIG";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub log_base: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub papers: Option<PathBuf>,
    pub authors: Option<PathBuf>,
    pub users: Option<PathBuf>,
    pub recs: Option<PathBuf>,
    pub condition: Option<Condition>,
    pub cap: Option<f64>,
    pub scoring: ScoringConfig,
    pub seed: Option<u64>,
    pub normalization: Option<Normalization>,
    pub out: Option<PathBuf>,
    pub cascade: Option<bool>,
    pub exclude_negative_from_sources: Option<bool>,
    pub templates: Option<PathBuf>,
    pub coeffs: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// Config named by the environment, or the empty config.
    pub fn from_env() -> CliResult<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    /// Values from `flags` take precedence.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            papers: flags.papers.or(self.papers),
            authors: flags.authors.or(self.authors),
            users: flags.users.or(self.users),
            recs: flags.recs.or(self.recs),
            condition: flags.condition.or(self.condition),
            cap: flags.cap.or(self.cap),
            scoring: ScoringConfig {
                a: flags.scoring.a.or(self.scoring.a),
                b: flags.scoring.b.or(self.scoring.b),
                log_base: flags.scoring.log_base.or(self.scoring.log_base),
            },
            seed: flags.seed.or(self.seed),
            normalization: flags.normalization.or(self.normalization),
            out: flags.out.or(self.out),
            cascade: flags.cascade.or(self.cascade),
            exclude_negative_from_sources: flags
                .exclude_negative_from_sources
                .or(self.exclude_negative_from_sources),
            templates: flags.templates.or(self.templates),
            coeffs: flags.coeffs.or(self.coeffs),
        }
    }

    pub fn cap(&self) -> CliResult<f64> {
        let cap = self.cap.unwrap_or(scholrel::composer::DEFAULT_CAP);
        if !(0.0..=1.0).contains(&cap) {
            return Err(CliError::Config(format!("cap must lie in [0, 1], got {cap}")));
        }
        Ok(cap)
    }

    pub fn scoring_params(&self) -> CliResult<ScoringParams> {
        let d = ScoringParams::default();
        let p = ScoringParams {
            a: self.scoring.a.unwrap_or(d.a),
            b: self.scoring.b.unwrap_or(d.b),
            log_base: self.scoring.log_base.unwrap_or(d.log_base),
        };
        p.validate().map_err(CliError::config)?;
        Ok(p)
    }

    pub fn normalization(&self) -> CliResult<Normalization> {
        let n = self.normalization.unwrap_or_default();
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(n.avg_h_index) || !ok(n.avg_email_length) {
            return Err(CliError::Config(format!(
                "normalization divisors must be positive (avg_h_index = {}, avg_email_length = {})",
                n.avg_h_index, n.avg_email_length
            )));
        }
        Ok(n)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("missing `--{flag}` (or `{flag}` in the run config)")))
    }
}
