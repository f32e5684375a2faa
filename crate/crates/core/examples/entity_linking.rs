//! Link noisy company mentions to the fixture registry.
//!
//! ```text
//! cargo run --example entity_linking -- "THALES S.A." "Enédis (Courbevoie)"
//! ```

use std::path::PathBuf;

use crewline::events::{link_entity, normalize_company_name, DEFAULT_LINK_THRESHOLD};
use crewline::ingest::load_company_records;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");
    let registry = load_company_records(&dir.join("companies.csv"))?;

    let mut mentions: Vec<String> = std::env::args().skip(1).collect();
    if mentions.is_empty() {
        mentions = ["Enedis (COURBEVOIE)", "TAGEOS SAS", "Thales Group", "Thalès", "Tagos", "Orange"]
            .map(String::from)
            .to_vec();
    }
    for m in &mentions {
        let key = normalize_company_name(m);
        match link_entity(m, &registry, DEFAULT_LINK_THRESHOLD) {
            Some((rec, score)) => println!("{m:<24} [{key}] -> {} {} ({score:.4})", rec.siren, rec.name),
            None => println!("{m:<24} [{key}] -> unmatched"),
        }
    }
    Ok(())
}
