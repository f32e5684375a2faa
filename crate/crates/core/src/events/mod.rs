//! Event extraction, enrichment and classification: the work behind the
//! crawler, enrichment and explorer agents.

mod classify;
mod crawl;
mod enrich;
mod linking;
mod pipeline;
mod taxonomy;

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ingest::{CompanyRecord, FinancialRecord, MoneyAmount};

pub use classify::{classification_prompt, classify_event, resolve_reply};
pub use crawl::{crawl_events, Crawl, ValidationAction, ValidationEntry, DEFAULT_BATCH_SIZE};
pub use enrich::{enrich_event, EnrichmentSources, ReviewIndex, DEFAULT_SNIPPETS};
pub use linking::{
    jaro, jaro_winkler, link_entity, link_score, normalize_company_name, DEFAULT_LINK_THRESHOLD,
};
pub use pipeline::{
    classify_stage, enrich_stage, extract_stage, run_pipeline, PipelineOptions, PipelineOutput,
    StageRunner,
};
pub use taxonomy::{Category, Taxonomy, TaxonomyEntry, UNCATEGORIZED};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusinessEvent {
    /// `<article_id>#<ordinal>`.
    pub id: String,
    pub article_id: String,
    pub date: NaiveDate,
    pub summary: String,
    pub companies: Vec<String>,
    pub persons: Vec<String>,
    pub locations: Vec<String>,
    pub amounts: Vec<MoneyAmount>,
    pub context: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewSnippet {
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyLink {
    pub mention: String,
    pub siren: Option<String>,
    pub profile: Option<CompanyRecord>,
    pub financial: Option<FinancialRecord>,
    pub review_snippets: Vec<ReviewSnippet>,
    pub match_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichedEvent {
    pub event: BusinessEvent,
    pub links: Vec<CompanyLink>,
    pub category: Option<Category>,
}

/// One compact JSON document per line, each line newline-terminated.
pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("events serialize"));
        out.push('\n');
    }
    out
}

/// Parse JSON Lines. Blank lines are skipped; errors carry the 1-based line.
pub fn from_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, (usize, serde_json::Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| (i + 1, e)))
        .collect()
}
