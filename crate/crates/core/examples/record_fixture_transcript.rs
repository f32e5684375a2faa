//! Regenerates `fixtures/golden/transcript.jsonl` from scripted model replies.
//!
//! The replies are what a model is expected to answer for the three
//! fixture articles. Recording them through the real prompt builder pins
//! the request fingerprints, so the fixture replays byte for byte.
//!
//! ```text
//! cargo run --example record_fixture_transcript [-- <transcript path>]
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use crewline::app::{self, Overrides, RunConfig};
use crewline::events::run_pipeline;
use crewline::llm::{Gateway, ScriptedBackend, TranscriptWriter};

const EXTRACTION: &str = r#"```json
[
  {
    "article_id": "news-0",
    "date": "3/2/2023",
    "summary": "Enedis (COURBEVOIE) to recruit 150 in Provence-Alpes-Côte-d'Azur to meet rising demand and expand the public electricity network.",
    "companies": ["Enedis"],
    "persons": [],
    "locations": ["Provence-Alpes-Côte-d'Azur"],
    "amounts": [],
    "context": "recruitment of 150 employees, 76 permanent positions and 67 work-study positions"
  },
  {
    "article_id": "news-1",
    "date": "3/2/2023",
    "summary": "Tageos, a Montpellier-based RFID tag manufacturer, to invest €18.1 million in a new factory in Fletcher, USA, creating 64 jobs.",
    "companies": ["Tageos"],
    "persons": [],
    "locations": ["Montpellier", "Fletcher, USA"],
    "amounts": ["€18.1 million"],
    "context": "factory construction and recruitment of 64 new employees"
  },
  {
    "article_id": "news-2",
    "date": "3/1/2023",
    "summary": "Thales plans to recruit 450 employees in Brittany in 2023, focusing on R&D and production roles.",
    "companies": ["Thales"],
    "persons": [],
    "locations": ["Brittany", "Ételles", "Brest"],
    "amounts": [],
    "context": "recruitment of 450 people"
  }
]
```"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");
    let target = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| dir.join("transcript.jsonl"));
    // The config requires the transcript to exist; any content will do.
    if !target.exists() {
        std::fs::write(&target, "")?;
    }
    let cfg = RunConfig::load(&dir.join("crewline.toml"), &Overrides::default()).map_err(|e| e.to_string())?;
    let articles = app::load_articles(&cfg).map_err(|e| e.to_string())?;
    let sources = app::load_sources(&cfg).map_err(|e| e.to_string())?;

    let replies = [EXTRACTION, "Recruitment", "Recruitment", "Recruitment"];
    let gateway = Gateway::with_backend(&cfg.llm, ScriptedBackend::new(replies))
        .recording(TranscriptWriter::create(&target)?);
    let crew = cfg.crew.build(Arc::new(gateway))?;
    let out = run_pipeline(&crew, articles, &sources, &cfg.taxonomy, cfg.pipeline_options())?;
    println!("recorded {} events to {}", out.events.len(), target.display());
    Ok(())
}
