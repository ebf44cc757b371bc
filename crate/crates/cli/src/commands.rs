//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use log::{info, warn};
use scholrel::analytics::coefficients::{did_direct_author, load_model, model2};
use scholrel::analytics::engagement::{summary_csv, summary_text};
use scholrel::analytics::{
    aggregate_h, did_fit, engagement_summary, fairness_from_values, peak_pct_featured, predict_ctr,
    Aggregation, DiDCoefficients, EngagementRecord, ModelCoefficients,
};
use scholrel::digest::{digest_file_name, render_digest, DigestFormat};
use scholrel::relevance::SourceOptions;
use scholrel::simulator::{self, EmailMeta, SimConfig};
use scholrel::{
    ingest_corpus, ingest_users, AlertEmail, Composer, ComposerOptions, Condition, CorpusIndex,
    EmailRequest, MessageTemplateSet, UserProfile,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io;
use crate::{AggregationArg, FormatArg, ReportKind};

fn load_corpus(cfg: &RunConfig) -> CliResult<CorpusIndex> {
    let papers = io::open(cfg.require(&cfg.papers, "papers")?)?;
    let authors = io::open(cfg.require(&cfg.authors, "authors")?)?;
    ingest_corpus(papers, authors).map_err(CliError::input)
}

fn load_users(cfg: &RunConfig) -> CliResult<Vec<UserProfile>> {
    ingest_users(io::open(cfg.require(&cfg.users, "users")?)?).map_err(CliError::input)
}

#[derive(Serialize)]
struct IndexSummary {
    papers: usize,
    authors: usize,
    users: Option<usize>,
    references: usize,
    in_corpus_citations: u64,
}

pub fn ingest(cfg: &RunConfig) -> CliResult<()> {
    let index = load_corpus(cfg)?;
    let users = match &cfg.users {
        Some(_) => Some(load_users(cfg)?.len()),
        None => None,
    };
    let summary = IndexSummary {
        papers: index.paper_count(),
        authors: index.author_count(),
        users,
        references: index.papers().map(|p| p.references.len()).sum(),
        in_corpus_citations: index.incoming_citations().values().map(|c| u64::from(*c)).sum(),
    };
    println!("papers: {}", summary.papers);
    println!("authors: {}", summary.authors);
    if let Some(u) = summary.users {
        println!("users: {u}");
    }
    println!("references: {}", summary.references);
    println!("in-corpus citations: {}", summary.in_corpus_citations);
    if let Some(out) = &cfg.out {
        io::ensure_dir(out)?;
        let json = serde_json::to_string_pretty(&summary).map_err(CliError::internal)?;
        io::write_text(&out.join("index_summary.json"), &(json + "\n"))?;
    }
    Ok(())
}

fn composer_options(cfg: &RunConfig) -> CliResult<ComposerOptions> {
    let templates = match &cfg.templates {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read templates {}: {e}", path.display())))?;
            MessageTemplateSet::from_json(&text).map_err(CliError::config)?
        }
        None => MessageTemplateSet::default(),
    };
    Ok(ComposerOptions {
        templates,
        params: cfg.scoring_params()?,
        sources: SourceOptions {
            exclude_negative_from_sources: cfg.exclude_negative_from_sources.unwrap_or(false),
        },
        cascade: cfg.cascade.unwrap_or(false),
    })
}

pub fn generate(cfg: &RunConfig) -> CliResult<()> {
    let condition = cfg.condition.unwrap_or(Condition::Control);
    let cap = cfg.cap()?;
    let seed = cfg.seed();
    let norm = cfg.normalization()?;
    let opts = composer_options(cfg)?;
    let index = load_corpus(cfg)?;
    let users = load_users(cfg)?;
    let requests: Vec<EmailRequest> = io::read_jsonl(cfg.require(&cfg.recs, "recs")?)?;
    let by_id: BTreeMap<_, _> = users.iter().map(|u| (u.id.clone(), u)).collect();
    let composer = Composer::new(&index, opts).map_err(CliError::config)?;

    let out = cfg.out_dir();
    let digests = out.join("digests");
    io::ensure_dir(&digests)?;

    let mut alerts = Vec::with_capacity(requests.len());
    let mut metas = Vec::with_capacity(requests.len());
    for (n, req) in requests.iter().enumerate() {
        let user = by_id.get(&req.user_id).ok_or_else(|| {
            CliError::Input(format!("recs line {}: unknown user `{}`", n + 1, req.user_id))
        })?;
        let email = composer
            .assemble_email(user, &req.feed_id, &req.date, &req.papers, condition, cap, seed)
            .map_err(CliError::config)?;
        for fmt in [DigestFormat::Text, DigestFormat::Html] {
            io::write_text(&digests.join(digest_file_name(&email, fmt)), &render_digest(&email, fmt))?;
        }
        metas.push(EmailMeta::from_email(&email, &index, Some(user), norm));
        alerts.push(email);
    }
    io::write_jsonl(&out.join("emails.jsonl"), &metas)?;
    io::write_jsonl(&out.join("alerts.jsonl"), &alerts)?;

    let messages: u32 = metas.iter().map(|m| m.n_messages).sum();
    let mean_pct = if metas.is_empty() {
        0.0
    } else {
        metas.iter().map(|m| m.pct_featured).sum::<f64>() / metas.len() as f64
    };
    println!(
        "{} emails ({condition}, cap {cap}): {messages} messages, mean % featured {mean_pct:.4}",
        metas.len()
    );
    info!("wrote digests to {}", digests.display());
    Ok(())
}

pub fn render(cfg: &RunConfig, alerts: &Path, format: FormatArg) -> CliResult<()> {
    let emails: Vec<AlertEmail> = io::read_jsonl(alerts)?;
    let out = cfg.out_dir();
    io::ensure_dir(&out)?;
    let formats: &[DigestFormat] = match format {
        FormatArg::Text => &[DigestFormat::Text],
        FormatArg::Html => &[DigestFormat::Html],
        FormatArg::Both => &[DigestFormat::Text, DigestFormat::Html],
    };
    for email in &emails {
        for fmt in formats {
            io::write_text(&out.join(digest_file_name(email, *fmt)), &render_digest(email, *fmt))?;
        }
    }
    println!("rendered {} emails to {}", emails.len(), out.display());
    Ok(())
}

fn click_model(cfg: &RunConfig) -> CliResult<ModelCoefficients> {
    match &cfg.coeffs {
        Some(path) => load_model(path).map_err(CliError::config),
        None => Ok(model2()),
    }
}

pub fn simulate(
    cfg: &RunConfig,
    emails: Option<&Path>,
    sim_config: Option<&Path>,
    h_bias: Option<f64>,
) -> CliResult<()> {
    let mut sim = match sim_config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            SimConfig::from_json(&text).map_err(CliError::config)?
        }
        None => SimConfig {
            seed: 0,
            n_users: 0,
            emails_per_user: 0,
            early_fraction: 0.5,
            open_model: did_direct_author(),
            click_model: click_model(cfg)?,
            clicked_h_bias: None,
        },
    };
    if let Some(seed) = cfg.seed {
        sim.seed = seed;
    }
    if sim_config.is_some() && cfg.coeffs.is_some() {
        sim.click_model = click_model(cfg)?;
    }
    if h_bias.is_some() {
        sim.clicked_h_bias = h_bias;
    }
    sim.validate().map_err(CliError::config)?;

    let out = cfg.out_dir();
    let emails_path = emails.map(Path::to_path_buf).unwrap_or_else(|| out.join("emails.jsonl"));
    let metas: Vec<EmailMeta> = io::read_jsonl(&emails_path)?;
    let logs = simulator::simulate(&sim, &metas).map_err(CliError::input)?;
    io::ensure_dir(&out)?;
    io::write_jsonl(&out.join("logs.jsonl"), &logs)?;
    let opened = logs.iter().filter(|r| r.opened).count();
    let clicked = logs.iter().filter(|r| r.clicked).count();
    println!("{} emails: {opened} opened, {clicked} clicked (seed {})", logs.len(), sim.seed);
    Ok(())
}

pub fn analyze(
    cfg: &RunConfig,
    report: ReportKind,
    logs: Option<&Path>,
    emails: Option<&Path>,
    aggregation: AggregationArg,
    h_norm: &[f64],
) -> CliResult<()> {
    let out = cfg.out_dir();
    let logs_path = || logs.map(Path::to_path_buf).unwrap_or_else(|| out.join("logs.jsonl"));
    match report {
        ReportKind::Summary => {
            let records: Vec<EngagementRecord> = io::read_jsonl(&logs_path())?;
            if records.is_empty() {
                warn!("engagement log is empty");
            }
            let summary = engagement_summary(&records);
            print!("{}", summary_text(&summary));
            io::ensure_dir(&out)?;
            io::write_text(&out.join("summary.csv"), &summary_csv(&summary))
        }
        ReportKind::Did => {
            let records: Vec<EngagementRecord> = io::read_jsonl(&logs_path())?;
            did_report(&records, &out)
        }
        ReportKind::Fairness => {
            let records: Vec<EngagementRecord> = io::read_jsonl(&logs_path())?;
            let emails_path = emails.map(Path::to_path_buf).unwrap_or_else(|| out.join("emails.jsonl"));
            let metas: Vec<EmailMeta> = io::read_jsonl(&emails_path)?;
            fairness(&records, &metas, aggregation, &out)
        }
        ReportKind::Curve => curve(cfg, h_norm, &out),
    }
}

fn did_report(records: &[EngagementRecord], out: &Path) -> CliResult<()> {
    let mut fits: BTreeMap<Condition, DiDCoefficients> = BTreeMap::new();
    for cond in Condition::ALL.into_iter().filter(|c| *c != Condition::Control) {
        if !records.iter().any(|r| r.condition == cond) {
            continue;
        }
        let fit = did_fit(records, cond).map_err(|e| CliError::Input(format!("{cond}: {e}")))?;
        fits.insert(cond, fit);
    }
    if fits.is_empty() {
        return Err(CliError::Input("no treatment emails in log".into()));
    }
    let mut csv = String::from("condition,intercept,early_exposure,message,interaction\n");
    println!("{:<16} {:>10} {:>10} {:>10} {:>12}", "condition", "intercept", "early", "message", "interaction");
    for (c, f) in &fits {
        println!(
            "{:<16} {:>10.4} {:>10.4} {:>10.4} {:>12.4}",
            c.as_str(),
            f.intercept,
            f.early_exposure,
            f.message,
            f.interaction
        );
        let _ = writeln!(csv, "{c},{},{},{},{}", f.intercept, f.early_exposure, f.message, f.interaction);
    }
    io::ensure_dir(out)?;
    let json = serde_json::to_string_pretty(&fits).map_err(CliError::internal)?;
    io::write_text(&out.join("did.json"), &(json + "\n"))?;
    io::write_text(&out.join("did.csv"), &csv)
}

fn fairness(
    records: &[EngagementRecord],
    metas: &[EmailMeta],
    aggregation: AggregationArg,
    out: &Path,
) -> CliResult<()> {
    let agg = match aggregation {
        AggregationArg::Max => Aggregation::Max,
        AggregationArg::Mean => Aggregation::Mean,
    };
    let background: Vec<Option<f64>> = metas
        .iter()
        .flat_map(|m| m.recs.iter().map(|r| aggregate_h(&r.author_h, agg)))
        .collect();
    let mut clicked: BTreeMap<Condition, Vec<Option<f64>>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.clicked) {
        let v = match agg {
            Aggregation::Max => r.max_author_h.map(f64::from),
            Aggregation::Mean => r.mean_author_h,
        };
        clicked.entry(r.condition).or_default().push(v);
    }
    let report = fairness_from_values(agg, &background, &clicked);
    print!("{}", report.to_text());
    io::ensure_dir(out)?;
    io::write_text(&out.join("fairness.txt"), &report.to_text())?;
    io::write_text(&out.join("fairness.csv"), &report.to_csv())
}

fn curve(cfg: &RunConfig, h_norm: &[f64], out: &Path) -> CliResult<()> {
    let model = click_model(cfg)?;
    let hs: Vec<f64> = if h_norm.is_empty() { vec![0.0, 1.0] } else { h_norm.to_vec() };
    let mut profiles = Vec::new();
    for claimed in [false, true] {
        for h in &hs {
            profiles.push((claimed, *h));
        }
    }
    let mut csv = String::from("x");
    for (claimed, h) in &profiles {
        let _ = write!(csv, ",{}_h{h}", if *claimed { "claimed" } else { "unclaimed" });
    }
    csv.push('\n');
    for step in 0..=100 {
        let x = f64::from(step) / 100.0;
        let _ = write!(csv, "{x:.2}");
        for (claimed, h) in &profiles {
            let _ = write!(csv, ",{:.8}", predict_ctr(&model, x, 0.0, *claimed, *h));
        }
        csv.push('\n');
    }
    for (claimed, h) in &profiles {
        let peak = peak_pct_featured(&model, *claimed, *h)
            .map_or_else(|| "none".to_owned(), |x| format!("{x:.4}"));
        println!("claimed={claimed} h_norm={h}: peak % featured {peak}");
    }
    io::ensure_dir(out)?;
    io::write_text(&out.join("curve.csv"), &csv)
}

pub fn predict(
    cfg: &RunConfig,
    pct: f64,
    claimed: bool,
    h_norm: f64,
    n_papers_norm: f64,
) -> CliResult<()> {
    if !(0.0..=1.0).contains(&pct) {
        return Err(CliError::Input(format!("--pct must lie in [0, 1], got {pct}")));
    }
    let model = click_model(cfg)?;
    let ctr = predict_ctr(&model, pct, n_papers_norm, claimed, h_norm);
    println!("ctr: {ctr:.6}");
    match peak_pct_featured(&model, claimed, h_norm) {
        Some(x) => println!("peak % featured: {x:.4}"),
        None => println!("peak % featured: none"),
    }
    Ok(())
}
