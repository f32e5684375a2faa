use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    CsvBundle,
    Markdown,
}

/// Pretty JSON, two-space indent, trailing newline. Map keys are sorted.
pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf-8 is utf-8")
}

pub fn report_category_csv(r: &Report) -> String {
    csv_string(
        &["month", "category", "count"],
        r.category_counts.iter().map(|(c, n)| vec![r.month.to_string(), c.clone(), n.to_string()]),
    )
}

/// Region rows, then one `unlocated` row with an empty region.
pub fn report_geo_csv(r: &Report) -> String {
    let rows = r
        .geo
        .iter()
        .map(|(g, n)| vec![r.focus_category.clone(), g.clone(), n.to_string()])
        .chain(std::iter::once(vec![r.focus_category.clone(), String::new(), r.unlocated.to_string()]));
    csv_string(&["category", "region", "count"], rows)
}

pub fn report_focus_csv(r: &Report) -> String {
    csv_string(
        &["category", "event_id"],
        r.focus_events.iter().map(|id| vec![r.focus_category.clone(), id.clone()]),
    )
}

pub fn report_companies_csv(r: &Report) -> String {
    csv_string(
        &["name", "siren", "events"],
        r.companies
            .iter()
            .map(|c| vec![c.name.clone(), c.siren.clone().unwrap_or_default(), c.events.to_string()]),
    )
}

fn cell(s: &str) -> String {
    s.replace('\\', "\\\\").replace('|', "\\|").replace('\n', " ")
}

fn table(out: &mut String, title: &str, header: &[&str], rows: &[Vec<String>]) {
    out.push_str(&format!("## {title}\n\n| {} |\n|", header.join(" | ")));
    for _ in header {
        out.push_str("---|");
    }
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| cell(c)).collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    out.push('\n');
}

/// One table per aggregate.
pub fn report_markdown(r: &Report) -> String {
    let mut out = format!("# Business events, {}\n\nFocus category: {}\n\n", r.month, cell(&r.focus_category));
    let counts: Vec<_> = r.category_counts.iter().map(|(c, n)| vec![c.clone(), n.to_string()]).collect();
    table(&mut out, "Events per category", &["Category", "Events"], &counts);
    let mut geo: Vec<_> = r.geo.iter().map(|(g, n)| vec![g.clone(), n.to_string()]).collect();
    geo.push(vec!["(unlocated)".into(), r.unlocated.to_string()]);
    table(&mut out, &format!("{} events per region", r.focus_category), &["Region", "Events"], &geo);
    let focus: Vec<_> = r.focus_events.iter().map(|id| vec![id.clone()]).collect();
    table(&mut out, &format!("{} events", r.focus_category), &["Event"], &focus);
    let companies: Vec<_> = r
        .companies
        .iter()
        .map(|c| vec![c.name.clone(), c.siren.clone().unwrap_or_default(), c.events.to_string()])
        .collect();
    table(&mut out, "Originating companies", &["Company", "SIREN", "Events"], &companies);
    out.truncate(out.trim_end().len());
    out.push('\n');
    out
}

/// Write `report` under `dir` in `format`; returns the written paths.
pub fn render_report(report: &Report, format: ReportFormat, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let files: Vec<(&str, String)> = match format {
        ReportFormat::Json => vec![("report.json", report_json(report))],
        ReportFormat::Markdown => vec![("report.md", report_markdown(report))],
        ReportFormat::CsvBundle => vec![
            ("report-category-counts.csv", report_category_csv(report)),
            ("report-geo.csv", report_geo_csv(report)),
            ("report-focus-events.csv", report_focus_csv(report)),
            ("report-companies.csv", report_companies_csv(report)),
        ],
    };
    std::fs::create_dir_all(dir)?;
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            Ok(path)
        })
        .collect()
}
