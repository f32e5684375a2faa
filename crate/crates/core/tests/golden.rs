mod common;

use common::*;
use crewline::app::{cmd_run, Overrides, RunConfig};
use crewline::events::{from_jsonl, EnrichedEvent, ValidationEntry};

#[test]
fn fixture_run_details() {
    let out = tempfile::tempdir().unwrap();
    let overrides = Overrides { out: Some(out.path().to_path_buf()), ..Overrides::default() };
    let cfg = RunConfig::load(&fixture_config(), &overrides).unwrap();
    let outcome = cmd_run(&cfg).unwrap();
    assert_eq!(outcome.events, 3);

    let events: Vec<EnrichedEvent> = from_jsonl(&read(&out.path().join("events.jsonl"))).unwrap();
    let ids: Vec<_> = events.iter().map(|e| e.event.id.as_str()).collect();
    assert_eq!(ids, ["news-0#0", "news-1#0", "news-2#0"]);
    let dates: Vec<_> = events.iter().map(|e| e.event.date.to_string()).collect();
    assert_eq!(dates, ["2023-03-02", "2023-03-02", "2023-03-01"]);

    let tageos = &events[1];
    assert_eq!(tageos.event.amounts.len(), 1);
    assert_eq!(tageos.event.amounts[0].minor_units, 1_810_000_000);
    let link = &tageos.links[0];
    assert_eq!(link.profile.as_ref().unwrap().employees.as_deref(), Some("50 to 99"));
    assert!(link.financial.as_ref().is_some_and(|f| f.turnover.is_none()));
    assert_eq!(link.review_snippets.len(), 1);
    assert!(link.review_snippets[0].text.starts_with("Leader in the manufacturing of RFID TAGs"));

    let thales = &events[2].links[0];
    assert_eq!(thales.profile.as_ref().unwrap().hq_address, "45 RUE BOURSAULT 75017 PARIS");
    assert_eq!(thales.financial.as_ref().unwrap().fiscal_year, 2022);
    assert!(thales.review_snippets.len() <= 3);

    let validation: Vec<ValidationEntry> = from_jsonl(&read(&out.path().join("validation-report.jsonl"))).unwrap();
    assert!(validation.is_empty());

    let enriched = read(&out.path().join("enriched.jsonl"));
    let unclassified: Vec<EnrichedEvent> = from_jsonl(&enriched).unwrap();
    assert!(unclassified.iter().all(|e| e.category.is_none()));

    let md = read(&out.path().join("report.md"));
    assert!(md.contains("| Recruitment | 3 |"));
    assert!(md.contains("| Thales | 849735980 | 1 |"));
    assert_eq!(
        read(&out.path().join("report-geo.csv")),
        "category,region,count\nRecruitment,Brittany,1\nRecruitment,Occitanie,1\nRecruitment,Provence-Alpes-Côte-d'Azur,1\nRecruitment,,0\n"
    );
}
