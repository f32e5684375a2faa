//! Build the three-agent crew and replay the fixture transcript through it,
//! printing each task's output.
//!
//! ```text
//! cargo run --example crew_replay
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use crewline::crew::CrewDefinition;
use crewline::events::{run_pipeline, EnrichmentSources, PipelineOptions, Taxonomy};
use crewline::ingest::{load_company_records, load_financial_records, load_news, load_reviews};
use crewline::llm::{Gateway, LlmConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");
    let gateway = Gateway::from_config(&LlmConfig::replay(dir.join("transcript.jsonl")))?;
    let crew = CrewDefinition::business_events().build(Arc::new(gateway))?;
    for (agent, task) in crew.agents().iter().zip(crew.tasks()) {
        println!("{:<18} {}", agent.role, task.description);
    }

    let sources = EnrichmentSources::new(
        load_company_records(&dir.join("companies.csv"))?,
        load_financial_records(&dir.join("financials.csv"))?,
        &load_reviews(&dir.join("reviews.md"))?,
    )?;
    let articles = load_news(&dir.join("news.txt"))?;
    let out = run_pipeline(&crew, articles, &sources, &Taxonomy::default(), PipelineOptions::default())?;

    for record in &out.crew.per_task {
        println!("\n== task {} ({}): {} bytes", record.index, record.agent_role, record.raw.len());
    }
    for e in &out.events {
        let category = e.category.as_ref().map(|c| c.name()).unwrap_or("-");
        println!("{} [{category}] {}", e.event.id, e.event.summary);
    }
    Ok(())
}
