//! The whole pipeline from a config file, as `crewline run` does it.
//!
//! ```text
//! cargo run --example golden_pipeline [-- <output dir>]
//! ```

use std::path::PathBuf;

use crewline::app::{cmd_run, Overrides, RunConfig};

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("crewline-golden"));
    let overrides = Overrides { out: Some(out), ..Overrides::default() };
    let result = RunConfig::load(&dir.join("crewline.toml"), &overrides).and_then(|cfg| cmd_run(&cfg));
    match result {
        Ok(outcome) => {
            println!("{} events", outcome.events);
            for f in outcome.files {
                println!("  {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
