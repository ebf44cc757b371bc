//! `scholrel`: ingest a corpus, generate alert emails with relevance
//! messages, simulate engagement, and analyse the logs.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scholrel::Condition;

use crate::config::{RunConfig, ScoringConfig};

#[derive(Parser, Debug)]
#[command(name = "scholrel", version, about = "Relevance messages for scholarly paper alerts")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// papers.jsonl
    #[arg(long, global = true)]
    papers: Option<PathBuf>,
    /// authors.jsonl
    #[arg(long, global = true)]
    authors: Option<PathBuf>,
    /// users.jsonl
    #[arg(long, global = true)]
    users: Option<PathBuf>,
    /// Email requests: one `{user_id, feed_id, date, papers}` per line.
    #[arg(long, global = true)]
    recs: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_condition)]
    condition: Option<Condition>,
    /// Largest share of an email's papers that may carry a message.
    #[arg(long, global = true)]
    cap: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Click-model coefficient file (JSON).
    #[arg(long, global = true)]
    coeffs: Option<PathBuf>,
    /// Co-authorship weight in triplet relevance.
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Citation weight in triplet relevance.
    #[arg(long, global = true)]
    b: Option<f64>,
    #[arg(long = "log-base", global = true)]
    log_base: Option<f64>,
    /// Template overrides (JSON object of key to template).
    #[arg(long, global = true)]
    templates: Option<PathBuf>,
    /// Fall back to other message kinds (direct > citation > indirect).
    #[arg(long, global = true)]
    cascade: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load the corpus and print entity counts.
    Ingest,
    /// Assemble and render alert emails for every request.
    Generate,
    /// Re-render alert emails from an `alerts.jsonl` file.
    Render {
        #[arg(long)]
        alerts: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Both)]
        format: FormatArg,
    },
    /// Draw opens and clicks for generated emails.
    Simulate {
        /// Email metadata written by `generate`.
        #[arg(long)]
        emails: Option<PathBuf>,
        /// Simulator configuration (JSON); defaults to the shipped models.
        #[arg(long = "sim-config")]
        sim_config: Option<PathBuf>,
        /// Click papers with weight `max author h ^ bias`.
        #[arg(long = "h-bias")]
        h_bias: Option<f64>,
    },
    /// Produce a report from engagement logs or coefficient files.
    Analyze {
        #[arg(long, value_enum)]
        report: ReportKind,
        #[arg(long)]
        logs: Option<PathBuf>,
        /// Email metadata, for the fairness background.
        #[arg(long)]
        emails: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AggregationArg::Max)]
        aggregation: AggregationArg,
        /// Receiver h-index profiles for the curve report (repeatable).
        #[arg(long = "h-norm")]
        h_norm: Vec<f64>,
    },
    /// Predicted click-through rate at a given share of featured papers.
    PredictCtr {
        #[arg(long)]
        pct: f64,
        #[arg(long)]
        claimed: bool,
        #[arg(long = "h-norm", default_value_t = 0.0)]
        h_norm: f64,
        #[arg(long = "n-papers-norm", default_value_t = 0.0)]
        n_papers_norm: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Html,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Summary,
    Did,
    Fairness,
    Curve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    Max,
    Mean,
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    s.parse::<Condition>().map_err(|e| e.to_string())
}

impl CommonArgs {
    fn as_config(&self) -> RunConfig {
        RunConfig {
            papers: self.papers.clone(),
            authors: self.authors.clone(),
            users: self.users.clone(),
            recs: self.recs.clone(),
            condition: self.condition,
            cap: self.cap,
            scoring: ScoringConfig {
                a: self.a,
                b: self.b,
                log_base: self.log_base,
            },
            seed: self.seed,
            normalization: None,
            out: self.out.clone(),
            cascade: self.cascade.then_some(true),
            exclude_negative_from_sources: None,
            templates: self.templates.clone(),
            coeffs: self.coeffs.clone(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match RunConfig::from_env() {
        Ok(file) => file.overlay(cli.common.as_config()),
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Ingest => commands::ingest(&cfg),
        Command::Generate => commands::generate(&cfg),
        Command::Render { alerts, format } => commands::render(&cfg, &alerts, format),
        Command::Simulate { emails, sim_config, h_bias } => {
            commands::simulate(&cfg, emails.as_deref(), sim_config.as_deref(), h_bias)
        }
        Command::Analyze { report, logs, emails, aggregation, h_norm } => {
            commands::analyze(&cfg, report, logs.as_deref(), emails.as_deref(), aggregation, &h_norm)
        }
        Command::PredictCtr { pct, claimed, h_norm, n_papers_norm } => {
            commands::predict(&cfg, pct, claimed, h_norm, n_papers_norm)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
