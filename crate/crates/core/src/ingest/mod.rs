//! Loaders for every input source: dated news files, the company registry,
//! financial tables, consumer reviews and local HTML pages.
//!
//! All loaders are pure functions of the file contents. Binary formats
//! (spreadsheets, PDF) are expected to arrive pre-converted to CSV or text.

mod date;
mod html;
mod money;
mod news;
mod tables;

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use date::parse_date;
pub use html::{html_to_text, load_html_text};
pub use money::{parse_money, Currency, MoneyAmount};
pub use news::{load_news, parse_news, serialize_news};
pub use tables::{
    load_company_records, load_company_table, load_financial_records, load_financial_table,
    load_reviews, parse_reviews_text, TableLoad,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record in block {block}: {reason}")]
    MalformedRecord { block: usize, reason: String },
    #[error("row {row}: SIREN {value:?} is not exactly 9 digits")]
    BadSiren { row: usize, value: String },
    #[error("header is missing required columns: {}", missing.join(", "))]
    HeaderMismatch { missing: Vec<String> },
    #[error("row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },
    #[error("unparsable money amount {0:?}")]
    UnparsableMoney(String),
    #[error("unparsable date {0:?}")]
    UnparsableDate(String),
    #[error("line {line}: review appears before any company heading")]
    OrphanReview { line: usize },
    #[error("line {line}: empty review bullet")]
    EmptyReview { line: usize },
}

pub(crate) fn read_utf8(path: &Path) -> Result<String, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    Ok(text.replace("\r\n", "\n"))
}

/// A dated news article. `id` is `<file stem>-<ordinal>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsArticle {
    pub id: String,
    pub date: NaiveDate,
    pub body: String,
}

/// One row of the company registry, keyed by SIREN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanyRecord {
    pub siren: String,
    pub name: String,
    pub hq_address: String,
    pub phone: Option<String>,
    /// Kept verbatim; the registry mixes exact counts and ranges ("50 to 99").
    pub employees: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinancialRecord {
    pub company_name: String,
    pub turnover: Option<MoneyAmount>,
    pub fiscal_year: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub company_name: String,
    pub text: String,
}

pub fn is_valid_siren(s: &str) -> bool {
    s.len() == 9 && s.bytes().all(|b| b.is_ascii_digit())
}
