//! Dashboard aggregates over classified events: monthly category counts,
//! regional density for one category, filtered event lists and the
//! companies behind them.

mod gazetteer;
mod render;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::events::{normalize_company_name, EnrichedEvent, UNCATEGORIZED};

pub use gazetteer::{Gazetteer, GazetteerError, Region};
pub use render::{
    render_report, report_category_csv, report_companies_csv, report_focus_csv, report_geo_csv, report_json,
    report_markdown, ReportFormat,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        Self { year: date.year(), month: date.month() }
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        Self::of(date) == *self
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = String;

    /// `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected YYYY-MM, got {s:?}");
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        let month = m.parse().map_err(|_| bad())?;
        Self::new(year, month).ok_or_else(bad)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Category name of an event; unclassified events count as `Uncategorized`.
pub fn category_of(event: &EnrichedEvent) -> &str {
    event.category.as_ref().map_or(UNCATEGORIZED, |c| c.name())
}

pub fn category_counts(events: &[EnrichedEvent], month: YearMonth) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for e in events.iter().filter(|e| month.contains(e.event.date)) {
        *counts.entry(category_of(e).to_string()).or_default() += 1;
    }
    counts
}

/// Region counts for events in `category`, plus how many had no resolvable
/// location.
pub fn geo_density(events: &[EnrichedEvent], category: &str, gazetteer: &Gazetteer) -> (BTreeMap<String, usize>, usize) {
    let mut geo = BTreeMap::new();
    let mut unlocated = 0;
    for e in events.iter().filter(|e| category_of(e) == category) {
        match gazetteer.resolve_any(&e.event.locations) {
            Some(region) => *geo.entry(region.to_string()).or_default() += 1,
            None => unlocated += 1,
        }
    }
    (geo, unlocated)
}

/// Stable-order subset. `None` disables a filter; the date range is
/// inclusive.
pub fn filter_events<'a>(
    events: &'a [EnrichedEvent],
    category: Option<&str>,
    range: Option<(NaiveDate, NaiveDate)>,
) -> Vec<&'a EnrichedEvent> {
    if let Some((start, end)) = range {
        if end < start {
            tracing::warn!(%start, %end, "date range ends before it starts");
            return Vec::new();
        }
    }
    events
        .iter()
        .filter(|e| category.is_none_or(|c| category_of(e) == c))
        .filter(|e| range.is_none_or(|(s, t)| s <= e.event.date && e.event.date <= t))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanyRow {
    pub name: String,
    pub siren: Option<String>,
    pub events: usize,
}

/// Companies behind events in `category`: keyed by SIREN when linked, else
/// by normalized mention. Each event counts once per company.
pub fn companies_for_category(events: &[EnrichedEvent], category: &str) -> Vec<CompanyRow> {
    let mut rows: BTreeMap<String, CompanyRow> = BTreeMap::new();
    for e in events.iter().filter(|e| category_of(e) == category) {
        let mut mentioned: Vec<(String, String, Option<String>)> = Vec::new();
        if e.links.is_empty() {
            for m in &e.event.companies {
                mentioned.push((format!("name:{}", normalize_company_name(m)), m.clone(), None));
            }
        } else {
            for l in &e.links {
                match (&l.siren, &l.profile) {
                    (Some(s), Some(p)) => mentioned.push((format!("siren:{s}"), p.name.clone(), Some(s.clone()))),
                    _ => mentioned.push((format!("name:{}", normalize_company_name(&l.mention)), l.mention.clone(), None)),
                }
            }
        }
        mentioned.retain(|(key, _, _)| key != "name:");
        mentioned.sort();
        mentioned.dedup_by(|a, b| a.0 == b.0);
        for (key, name, siren) in mentioned {
            rows.entry(key).or_insert(CompanyRow { name, siren, events: 0 }).events += 1;
        }
    }
    let mut out: Vec<CompanyRow> = rows.into_values().collect();
    out.sort_by(|a, b| b.events.cmp(&a.events).then_with(|| a.name.cmp(&b.name)).then_with(|| a.siren.cmp(&b.siren)));
    out
}

/// The dashboard for one month. Focus aggregates cover in-month events of
/// the focus category only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub month: YearMonth,
    pub focus_category: String,
    pub category_counts: BTreeMap<String, usize>,
    pub geo: BTreeMap<String, usize>,
    pub unlocated: usize,
    pub focus_events: Vec<String>,
    pub companies: Vec<CompanyRow>,
}

pub fn build_report(events: &[EnrichedEvent], month: YearMonth, focus_category: &str, gazetteer: &Gazetteer) -> Report {
    let in_month: Vec<EnrichedEvent> = events.iter().filter(|e| month.contains(e.event.date)).cloned().collect();
    let (geo, unlocated) = geo_density(&in_month, focus_category, gazetteer);
    Report {
        month,
        focus_category: focus_category.to_string(),
        category_counts: category_counts(&in_month, month),
        geo,
        unlocated,
        focus_events: filter_events(&in_month, Some(focus_category), None)
            .into_iter()
            .map(|e| e.event.id.clone())
            .collect(),
        companies: companies_for_category(&in_month, focus_category),
    }
}

/// Month holding the most events; the earliest such month on ties.
pub fn busiest_month(events: &[EnrichedEvent]) -> Option<YearMonth> {
    let mut counts: BTreeMap<YearMonth, usize> = BTreeMap::new();
    for e in events {
        *counts.entry(YearMonth::of(e.event.date)).or_default() += 1;
    }
    counts.into_iter().fold(None, |best: Option<(YearMonth, usize)>, (m, n)| match best {
        Some((_, b)) if b >= n => best,
        _ => Some((m, n)),
    }).map(|(m, _)| m)
}

/// Most frequent category in `month`; alphabetical on ties.
pub fn dominant_category(events: &[EnrichedEvent], month: YearMonth) -> Option<String> {
    let counts = category_counts(events, month);
    let max = *counts.values().max()?;
    counts.into_iter().find(|(_, n)| *n == max).map(|(c, _)| c)
}
