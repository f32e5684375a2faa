//! Dashboard aggregates over a synthetic month of classified events.
//!
//! ```text
//! cargo run --example dashboard_report
//! ```

use chrono::NaiveDate;
use crewline::analytics::{build_report, report_markdown, Gazetteer, YearMonth};
use crewline::events::{BusinessEvent, EnrichedEvent, Taxonomy};

fn event(n: usize, day: u32, company: &str, location: &str, category: &str) -> EnrichedEvent {
    EnrichedEvent {
        event: BusinessEvent {
            id: format!("demo-{n}#0"),
            article_id: format!("demo-{n}"),
            date: NaiveDate::from_ymd_opt(2023, 3, day).expect("valid day"),
            summary: format!("{company} event"),
            companies: vec![company.into()],
            persons: vec![],
            locations: vec![location.into()],
            amounts: vec![],
            context: String::new(),
        },
        links: vec![],
        category: Taxonomy::default().category(category),
    }
}

fn main() {
    let events = vec![
        event(0, 2, "Solaris", "Montpellier", "Photovoltaic"),
        event(1, 5, "Solaris", "Nîmes, Occitanie", "Photovoltaic"),
        event(2, 9, "Helio Ouest", "Rennes", "Photovoltaic"),
        event(3, 12, "Thales", "Brittany", "Recruitment"),
        event(4, 20, "Sunwatt", "Lyon", "Photovoltaic"),
        event(5, 28, "Vent Marin", "Saint-Nazaire", "Wind power"),
    ];
    let month = YearMonth::new(2023, 3).expect("valid month");
    let report = build_report(&events, month, "Photovoltaic", &Gazetteer::french_regions());
    print!("{}", report_markdown(&report));
}
