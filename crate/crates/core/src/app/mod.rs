//! Configuration and the command implementations behind the `crewline`
//! binary. Every command reads and writes canonical files in the output
//! directory, so stages can be run one at a time.

mod config;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{build_report, busiest_month, dominant_category, render_report, Report, YearMonth};
use crate::crew::{Crew, CrewError, OutputKind};
use crate::events::{
    classify_stage, enrich_stage, extract_stage, from_jsonl, run_pipeline, to_jsonl, BusinessEvent, EnrichedEvent,
    EnrichmentSources, ReviewIndex,
};
use crate::ingest::{
    load_company_table, load_financial_table, load_news, load_reviews, IngestError, NewsArticle,
};
use crate::llm::{read_transcript, Gateway, Provider, ReplayBackend, TranscriptWriter};

pub use config::{
    load_gazetteer, parse_month, CorpusPaths, LlmMode, Overrides, ReportSettings, RetrievalSettings, RunConfig,
};

pub const ARTICLES_FILE: &str = "articles.jsonl";
pub const EXTRACTED_FILE: &str = "extracted.jsonl";
pub const VALIDATION_FILE: &str = "validation-report.jsonl";
pub const ENRICHED_FILE: &str = "enriched.jsonl";
pub const EVENTS_FILE: &str = "events.jsonl";
/// Transcript position reached by `extract`, so `classify` can resume.
pub const CURSOR_FILE: &str = "replay-cursor.json";

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad configuration or unreadable inputs. Exit code 2.
    #[error("{0}")]
    Config(String),
    /// A pipeline task failed. Exit code 1.
    #[error("{0}")]
    Pipeline(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Pipeline(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            AppError::Config(m) | AppError::Pipeline(m) => m,
        }
    }
}

impl From<CrewError> for AppError {
    fn from(e: CrewError) -> Self {
        match e {
            CrewError::InvalidCrew(m) => AppError::Config(format!("invalid crew: {m}")),
            e @ CrewError::TaskFailed { .. } => AppError::Pipeline(e.to_string()),
        }
    }
}

fn ingest_error(path: &Path, e: IngestError) -> AppError {
    match e {
        e @ IngestError::Io { .. } => AppError::Config(e.to_string()),
        e => AppError::Config(format!("{}: {e}", path.display())),
    }
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, AppError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| AppError::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| AppError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn read_stage<T: serde::de::DeserializeOwned>(dir: &Path, name: &str) -> Result<Vec<T>, AppError> {
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| AppError::Config(format!("cannot read stage input {}: {e}", path.display())))?;
    from_jsonl(&text).map_err(|(line, e)| AppError::Config(format!("{} line {line}: {e}", path.display())))
}

pub fn load_articles(cfg: &RunConfig) -> Result<Vec<NewsArticle>, AppError> {
    load_news(&cfg.paths.news).map_err(|e| ingest_error(&cfg.paths.news, e))
}

/// Company, financial and review tables. Rejected table rows are logged and
/// skipped.
pub fn load_sources(cfg: &RunConfig) -> Result<EnrichmentSources, AppError> {
    let p = &cfg.paths;
    let companies = load_company_table(&p.companies).map_err(|e| ingest_error(&p.companies, e))?;
    let financials = load_financial_table(&p.financials).map_err(|e| ingest_error(&p.financials, e))?;
    for (path, rejected) in [(&p.companies, &companies.rejected), (&p.financials, &financials.rejected)] {
        for r in rejected {
            tracing::warn!(file = %path.display(), error = %r, "row rejected");
        }
    }
    let reviews = load_reviews(&p.reviews).map_err(|e| ingest_error(&p.reviews, e))?;
    let index = ReviewIndex::build_with(&reviews, cfg.retrieval.chunk_tokens, cfg.retrieval.chunk_overlap)
        .map_err(|e| AppError::Config(format!("{}: {e}", p.reviews.display())))?;
    Ok(EnrichmentSources { companies: companies.records, financials: financials.records, reviews: index })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Resume {
    /// Replay from the first entry; recording truncates.
    Fresh,
    /// Replay from the saved cursor; recording appends.
    Continue,
}

#[derive(Debug, Serialize, Deserialize)]
struct Cursor {
    transcript: PathBuf,
    position: usize,
}

fn build_gateway(cfg: &RunConfig, resume: Resume) -> Result<Arc<Gateway>, AppError> {
    let config_err = |e: crate::llm::LlmError| AppError::Config(e.to_string());
    let replay_from = |path: &Path| -> Result<Gateway, AppError> {
        let entries = read_transcript(path).map_err(config_err)?;
        let position = match resume {
            Resume::Fresh => 0,
            Resume::Continue => read_cursor(&cfg.output_dir, path),
        };
        tracing::info!(transcript = %path.display(), entries = entries.len(), position, "replaying");
        Ok(Gateway::with_backend(&cfg.llm, ReplayBackend::starting_at(entries, position)))
    };
    let gateway = match &cfg.mode {
        LlmMode::Replay(path) => replay_from(path)?,
        LlmMode::Configured if cfg.llm.provider == Provider::Replay => match &cfg.llm.transcript {
            Some(path) => replay_from(path)?,
            None => return Err(AppError::Config("replay provider needs [paths] transcript or --replay".into())),
        },
        LlmMode::Configured => live_gateway(cfg)?,
        LlmMode::Record(path) => {
            let writer = match resume {
                Resume::Fresh => TranscriptWriter::create(path),
                Resume::Continue => TranscriptWriter::append(path),
            }
            .map_err(config_err)?;
            tracing::info!(transcript = %path.display(), "recording");
            live_gateway(cfg)?.recording(writer)
        }
    };
    Ok(Arc::new(gateway))
}

fn live_gateway(cfg: &RunConfig) -> Result<Gateway, AppError> {
    Gateway::from_config(&cfg.llm).map_err(|e| AppError::Config(e.to_string()))
}

fn read_cursor(dir: &Path, transcript: &Path) -> usize {
    let Ok(text) = std::fs::read_to_string(dir.join(CURSOR_FILE)) else { return 0 };
    match serde_json::from_str::<Cursor>(&text) {
        Ok(c) if c.transcript == transcript => c.position,
        _ => 0,
    }
}

fn replay_transcript(cfg: &RunConfig) -> Option<&Path> {
    match &cfg.mode {
        LlmMode::Replay(p) => Some(p),
        LlmMode::Configured if cfg.llm.provider == Provider::Replay => cfg.llm.transcript.as_deref(),
        _ => None,
    }
}

fn build_crew(cfg: &RunConfig, gateway: Arc<Gateway>) -> Result<Crew, AppError> {
    Ok(cfg.crew.build(gateway)?)
}

/// What a command wrote.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub events: usize,
    pub files: Vec<PathBuf>,
}

/// Parse the news file into `articles.jsonl`.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let articles = load_articles(cfg)?;
    load_sources(cfg)?;
    let file = write_file(&cfg.output_dir, ARTICLES_FILE, &to_jsonl(&articles))?;
    tracing::info!(articles = articles.len(), "ingested");
    Ok(Outcome { events: articles.len(), files: vec![file] })
}

/// `articles.jsonl` to `extracted.jsonl` and the validation report.
pub fn cmd_extract(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let articles: Vec<NewsArticle> = read_stage(&cfg.output_dir, ARTICLES_FILE)?;
    let gateway = build_gateway(cfg, Resume::Fresh)?;
    let crew = build_crew(cfg, gateway.clone())?;
    let sources = EnrichmentSources::new(vec![], vec![], &[]).expect("empty index builds");
    let (events, validation) = extract_stage(&crew, articles, &sources, &cfg.taxonomy, cfg.pipeline_options())?;
    let mut files = vec![
        write_file(&cfg.output_dir, EXTRACTED_FILE, &to_jsonl(&events))?,
        write_file(&cfg.output_dir, VALIDATION_FILE, &to_jsonl(&validation))?,
    ];
    if let (Some(transcript), Some(position)) = (replay_transcript(cfg), gateway.replay_position()) {
        let cursor = Cursor { transcript: transcript.to_path_buf(), position };
        files.push(write_file(&cfg.output_dir, CURSOR_FILE, &serde_json::to_string(&cursor).expect("cursor"))?);
    }
    tracing::info!(events = events.len(), dropped = validation.len(), calls = gateway.call_count(), "extracted");
    Ok(Outcome { events: events.len(), files })
}

/// `extracted.jsonl` to `enriched.jsonl`. No model calls.
pub fn cmd_enrich(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let events: Vec<BusinessEvent> = read_stage(&cfg.output_dir, EXTRACTED_FILE)?;
    let sources = load_sources(cfg)?;
    let enriched = enrich_stage(&events, &sources, cfg.pipeline_options());
    let file = write_file(&cfg.output_dir, ENRICHED_FILE, &to_jsonl(&enriched))?;
    tracing::info!(events = enriched.len(), "enriched");
    Ok(Outcome { events: enriched.len(), files: vec![file] })
}

/// `enriched.jsonl` to `events.jsonl`.
pub fn cmd_classify(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let enriched: Vec<EnrichedEvent> = read_stage(&cfg.output_dir, ENRICHED_FILE)?;
    let gateway = build_gateway(cfg, Resume::Continue)?;
    let crew = build_crew(cfg, gateway.clone())?;
    let sources = EnrichmentSources::new(vec![], vec![], &[]).expect("empty index builds");
    let events = classify_stage(&crew, enriched, &sources, &cfg.taxonomy, cfg.pipeline_options())?;
    let file = write_file(&cfg.output_dir, EVENTS_FILE, &to_jsonl(&events))?;
    tracing::info!(events = events.len(), calls = gateway.call_count(), "classified");
    Ok(Outcome { events: events.len(), files: vec![file] })
}

/// Report for `settings.month` (default: busiest month) and
/// `settings.category` (default: that month's most frequent category).
/// Returns `None` when there are no events and no month was given.
pub fn make_report(events: &[EnrichedEvent], settings: &ReportSettings, gazetteer: &crate::analytics::Gazetteer) -> Option<Report> {
    let month: YearMonth = settings.month.or_else(|| busiest_month(events))?;
    let category = settings
        .category
        .clone()
        .or_else(|| dominant_category(events, month))
        .unwrap_or_else(|| crate::events::UNCATEGORIZED.to_string());
    Some(build_report(events, month, &category, gazetteer))
}

/// `events.jsonl` to report files. Needs no model.
pub fn cmd_report(out_dir: &Path, gazetteer: Option<&Path>, settings: &ReportSettings) -> Result<Outcome, AppError> {
    let events: Vec<EnrichedEvent> = read_stage(out_dir, EVENTS_FILE)?;
    let gazetteer = load_gazetteer(gazetteer)?;
    write_reports(out_dir, &events, settings, &gazetteer)
}

fn write_reports(
    out_dir: &Path,
    events: &[EnrichedEvent],
    settings: &ReportSettings,
    gazetteer: &crate::analytics::Gazetteer,
) -> Result<Outcome, AppError> {
    let Some(report) = make_report(events, settings, gazetteer) else {
        tracing::warn!("no events and no month given; report skipped");
        return Ok(Outcome::default());
    };
    let mut files = Vec::new();
    for format in &settings.formats {
        files.extend(
            render_report(&report, *format, out_dir)
                .map_err(|e| AppError::Config(format!("cannot write report to {}: {e}", out_dir.display())))?,
        );
    }
    tracing::info!(month = %report.month, category = %report.focus_category, "report written");
    Ok(Outcome { events: report.focus_events.len(), files })
}

/// Every stage in one process; writes the same files as the stage commands
/// chained.
pub fn cmd_run(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let articles = load_articles(cfg)?;
    let sources = load_sources(cfg)?;
    let gazetteer = cfg.gazetteer()?;
    let gateway = build_gateway(cfg, Resume::Fresh)?;
    let crew = build_crew(cfg, gateway.clone())?;

    let mut files = vec![write_file(&cfg.output_dir, ARTICLES_FILE, &to_jsonl(&articles))?];
    let out = run_pipeline(&crew, articles, &sources, &cfg.taxonomy, cfg.pipeline_options())?;

    let enriched_raw = out
        .crew
        .per_task
        .iter()
        .rev()
        .find(|t| crew.tasks()[t.index].output_kind == OutputKind::JsonEnriched)
        .map(|t| t.raw.clone())
        .unwrap_or_default();
    files.push(write_file(&cfg.output_dir, EXTRACTED_FILE, &to_jsonl(&out.extracted))?);
    files.push(write_file(&cfg.output_dir, VALIDATION_FILE, &to_jsonl(&out.validation))?);
    files.push(write_file(&cfg.output_dir, ENRICHED_FILE, &enriched_raw)?);
    files.push(write_file(&cfg.output_dir, EVENTS_FILE, &to_jsonl(&out.events))?);
    files.extend(write_reports(&cfg.output_dir, &out.events, &cfg.report, &gazetteer)?.files);
    tracing::info!(events = out.events.len(), calls = gateway.call_count(), "run complete");
    Ok(Outcome { events: out.events.len(), files })
}
