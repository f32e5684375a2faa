//! Load the fixture corpora and print what each loader produced.
//!
//! ```text
//! cargo run --example ingest
//! ```

use std::path::PathBuf;

use crewline::ingest::{html_to_text, load_company_table, load_financial_table, load_news, load_reviews, parse_money};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");

    for a in load_news(&dir.join("news.txt"))? {
        let head: String = a.body.chars().take(60).collect();
        println!("{} {} {head}...", a.id, a.date);
    }

    let companies = load_company_table(&dir.join("companies.csv"))?;
    for c in &companies.records {
        println!("{} {:<8} {}", c.siren, c.name, c.hq_address);
    }
    for r in &companies.rejected {
        println!("rejected: {r}");
    }

    for f in load_financial_table(&dir.join("financials.csv"))?.records {
        match f.turnover {
            Some(t) => println!("{} {}: {} cents", f.company_name, f.fiscal_year, t.minor_units),
            None => println!("{} {}: turnover not disclosed", f.company_name, f.fiscal_year),
        }
    }

    let reviews = load_reviews(&dir.join("reviews.md"))?;
    println!("{} reviews", reviews.len());

    for text in ["€15.47 B", "€17,569 M", "18.1 million euros", "-"] {
        println!("{text:>20} -> {:?}", parse_money(text)?.map(|m| m.minor_units));
    }

    println!("{}", html_to_text("<p>Thales <b>recrute</b> &amp; investit.</p><script>x()</script>"));
    Ok(())
}
