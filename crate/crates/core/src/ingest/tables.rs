use std::collections::HashMap;
use std::path::Path;

use super::{
    is_valid_siren, parse_money, read_utf8, CompanyRecord, FinancialRecord, IngestError,
    ReviewRecord,
};

/// Rows that parsed plus rows that were rejected, with the reason.
#[derive(Debug)]
pub struct TableLoad<T> {
    pub records: Vec<T>,
    pub rejected: Vec<IngestError>,
}

impl<T> TableLoad<T> {
    fn into_strict(self) -> Result<Vec<T>, IngestError> {
        match self.rejected.into_iter().next() {
            Some(err) => Err(err),
            None => Ok(self.records),
        }
    }
}

fn sniff_delimiter(text: &str) -> u8 {
    let header = text.lines().next().unwrap_or("");
    b",;\t"
        .iter()
        .copied()
        .max_by_key(|&d| (header.bytes().filter(|&b| b == d).count(), d == b','))
        .unwrap_or(b',')
}

/// A delimiter-separated table with a header row. Column order is free;
/// extra columns are ignored.
struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<Result<Vec<String>, IngestError>>,
}

impl Table {
    fn parse(text: &str, required: &[&str]) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(sniff_delimiter(text))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| IngestError::InvalidRow { row: 0, reason: e.to_string() })?
            .clone();
        let columns: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_ascii_lowercase(), i))
            .collect();
        let missing: Vec<String> = required
            .iter()
            .filter(|c| !columns.contains_key(**c))
            .map(|c| c.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(IngestError::HeaderMismatch { missing });
        }
        let rows = reader
            .records()
            .enumerate()
            .map(|(i, r)| {
                r.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(|e| IngestError::InvalidRow { row: i + 1, reason: e.to_string() })
            })
            .collect();
        Ok(Self { columns, rows })
    }

    fn cell<'a>(&self, row: &'a [String], name: &str) -> &'a str {
        self.columns
            .get(name)
            .and_then(|&i| row.get(i))
            .map(String::as_str)
            .unwrap_or("")
    }

    fn load<T>(
        self,
        mut build: impl FnMut(&Self, usize, &[String]) -> Result<T, IngestError>,
    ) -> TableLoad<T> {
        let mut records = Vec::new();
        let mut rejected = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            match row.as_ref().map_err(clone_row_err).and_then(|r| build(&self, i + 1, r)) {
                Ok(rec) => records.push(rec),
                Err(e) => rejected.push(e),
            }
        }
        TableLoad { records, rejected }
    }
}

fn clone_row_err(e: &IngestError) -> IngestError {
    match e {
        IngestError::InvalidRow { row, reason } => IngestError::InvalidRow { row: *row, reason: reason.clone() },
        other => IngestError::InvalidRow { row: 0, reason: other.to_string() },
    }
}

fn optional(cell: &str) -> Option<String> {
    match cell.trim() {
        "" | "-" => None,
        s => Some(s.to_string()),
    }
}

const COMPANY_COLUMNS: [&str; 5] = ["siren", "name", "hq_address", "phone", "employees"];
const FINANCIAL_COLUMNS: [&str; 3] = ["company_name", "turnover", "fiscal_year"];

pub fn load_company_table(path: &Path) -> Result<TableLoad<CompanyRecord>, IngestError> {
    let table = Table::parse(&read_utf8(path)?, &COMPANY_COLUMNS)?;
    Ok(table.load(|t, row, cells| {
        let siren = t.cell(cells, "siren").to_string();
        if !is_valid_siren(&siren) {
            return Err(IngestError::BadSiren { row, value: siren });
        }
        let name = t.cell(cells, "name").to_string();
        if name.is_empty() {
            return Err(IngestError::InvalidRow { row, reason: "empty company name".into() });
        }
        Ok(CompanyRecord {
            siren,
            name,
            hq_address: t.cell(cells, "hq_address").to_string(),
            phone: optional(t.cell(cells, "phone")),
            employees: optional(t.cell(cells, "employees")),
        })
    }))
}

/// Strict variant: the first rejected row is returned as the error.
pub fn load_company_records(path: &Path) -> Result<Vec<CompanyRecord>, IngestError> {
    load_company_table(path)?.into_strict()
}

pub fn load_financial_table(path: &Path) -> Result<TableLoad<FinancialRecord>, IngestError> {
    let table = Table::parse(&read_utf8(path)?, &FINANCIAL_COLUMNS)?;
    Ok(table.load(|t, row, cells| {
        let company_name = t.cell(cells, "company_name").to_string();
        if company_name.is_empty() {
            return Err(IngestError::InvalidRow { row, reason: "empty company name".into() });
        }
        let turnover = parse_money(t.cell(cells, "turnover"))
            .map_err(|e| IngestError::InvalidRow { row, reason: e.to_string() })?;
        let year_cell = t.cell(cells, "fiscal_year");
        let fiscal_year: i32 = year_cell
            .parse()
            .ok()
            .filter(|y| (1900..=2200).contains(y))
            .ok_or_else(|| IngestError::InvalidRow {
                row,
                reason: format!("fiscal year {year_cell:?} outside 1900..=2200"),
            })?;
        Ok(FinancialRecord { company_name, turnover, fiscal_year })
    }))
}

pub fn load_financial_records(path: &Path) -> Result<Vec<FinancialRecord>, IngestError> {
    load_financial_table(path)?.into_strict()
}

/// Load reviews from either a `company_name,text` CSV (by extension) or a
/// sectioned text file: `## Company` headings followed by `- review` bullets.
/// Non-bullet lines continue the previous bullet.
pub fn load_reviews(path: &Path) -> Result<Vec<ReviewRecord>, IngestError> {
    let text = read_utf8(path)?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("tsv"));
    if !is_csv {
        return parse_reviews_text(&text);
    }
    let table = Table::parse(&text, &["company_name", "text"])?;
    table
        .load(|t, row, cells| {
            let company_name = t.cell(cells, "company_name").to_string();
            let text = t.cell(cells, "text").to_string();
            if company_name.is_empty() || text.is_empty() {
                return Err(IngestError::InvalidRow { row, reason: "empty company or review".into() });
            }
            Ok(ReviewRecord { company_name, text })
        })
        .into_strict()
}

pub fn parse_reviews_text(text: &str) -> Result<Vec<ReviewRecord>, IngestError> {
    let mut company: Option<String> = None;
    let mut out: Vec<ReviewRecord> = Vec::new();
    // Whether the last record pushed belongs to the current section.
    let mut open_bullet = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = i + 1;
        if let Some(heading) = line.strip_prefix("## ") {
            company = Some(heading.trim().to_string());
            open_bullet = false;
        } else if let Some(bullet) = line.strip_prefix('-') {
            let Some(name) = &company else {
                return Err(IngestError::OrphanReview { line: line_no });
            };
            let body = bullet.trim();
            if body.is_empty() {
                return Err(IngestError::EmptyReview { line: line_no });
            }
            out.push(ReviewRecord { company_name: name.clone(), text: body.to_string() });
            open_bullet = true;
        } else if line.is_empty() {
            open_bullet = false;
        } else if open_bullet {
            let last = out.last_mut().expect("open bullet implies a record");
            last.text.push(' ');
            last.text.push_str(line);
        }
    }
    Ok(out)
}
