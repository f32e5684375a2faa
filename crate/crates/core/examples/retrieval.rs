//! Chunk the fixture news and reviews, index them with BM25 and query.
//!
//! ```text
//! cargo run --example retrieval -- "recruit Brittany"
//! ```

use std::path::PathBuf;

use crewline::ingest::{load_news, load_reviews};
use crewline::retrieval::{build_index, chunk};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");
    let query = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let query = if query.is_empty() { "recruit electricity network".to_string() } else { query };

    let mut chunks = Vec::new();
    for a in load_news(&dir.join("news.txt"))? {
        chunks.extend(chunk(&a.id, &a.body, 24, 6)?);
    }
    for (i, r) in load_reviews(&dir.join("reviews.md"))?.iter().enumerate() {
        chunks.extend(chunk(&format!("review-{i}"), &r.text, 24, 6)?);
    }
    let index = build_index(chunks)?;
    println!("{} chunks indexed; query {query:?}", index.chunk_count());

    for hit in index.retrieve(&query, 5) {
        let c = index.chunk(&hit.chunk).expect("hit is indexed");
        println!("{:7.4} {}#{} {}", hit.score, c.doc_id, c.ordinal, c.text);
    }
    Ok(())
}
