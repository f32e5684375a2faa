use serde::{Deserialize, Serialize};

use crate::retrieval::tokenize;

pub const UNCATEGORIZED: &str = "Uncategorized";

/// A taxonomy member or the `Uncategorized` sentinel. Built through
/// [`Taxonomy::category`] or [`Category::uncategorized`]; deserialization
/// trusts the file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Category(String);

impl Category {
    pub fn uncategorized() -> Self {
        Self(UNCATEGORIZED.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_uncategorized(&self) -> bool {
        self.0 == UNCATEGORIZED
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Keywords match whole tokens; a trailing `*` matches any token with that
/// prefix. Tokens are lowercase and diacritic-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyEntry {
    pub name: String,
    #[serde(default)]
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    entries: Vec<TaxonomyEntry>,
}

const DEFAULT: [(&str, &[&str]); 10] = [
    ("Urban Planning", &["urban*", "planning", "housing", "zoning", "district*", "neighbo*", "redevelop*"]),
    ("Renewable Energy", &["renewable*", "hydrogen", "biomass", "biogas", "geotherm*", "decarboni*"]),
    ("Photovoltaic", &["photovolta*", "solar", "pv"]),
    ("Fundraising", &["fundrais*", "funding", "investor*", "raise", "raised", "raises", "financing"]),
    ("Recruitment", &["recruit*", "hiring", "hire", "hires", "hired", "job", "jobs", "workforce", "vacanc*"]),
    ("Acquisition", &["acqui*", "takeover*", "buyout*", "merger*", "purchas*"]),
    ("Agrivoltaics", &["agrivolta*"]),
    ("Production", &["produc*", "factory", "factories", "manufactur*", "output"]),
    ("Wind power", &["wind", "windfarm*", "turbine*", "offshore"]),
    ("Healthcare", &["health*", "hospital*", "medic*", "clinic*", "pharma*", "patient*"]),
];

impl Default for Taxonomy {
    fn default() -> Self {
        Self {
            entries: DEFAULT
                .iter()
                .map(|(name, kws)| TaxonomyEntry {
                    name: (*name).into(),
                    keywords: kws.iter().map(|k| (*k).into()).collect(),
                })
                .collect(),
        }
    }
}

impl Taxonomy {
    /// Names must be non-empty, distinct ignoring case, and not the sentinel.
    pub fn new(entries: Vec<TaxonomyEntry>) -> Result<Self, String> {
        if entries.is_empty() {
            return Err("taxonomy must not be empty".into());
        }
        for (i, e) in entries.iter().enumerate() {
            let name = e.name.trim();
            if name.is_empty() {
                return Err(format!("taxonomy entry {i} has an empty name"));
            }
            if name.eq_ignore_ascii_case(UNCATEGORIZED) {
                return Err(format!("{UNCATEGORIZED:?} is reserved"));
            }
            if entries[..i].iter().any(|p| p.name.trim().to_lowercase() == name.to_lowercase()) {
                return Err(format!("duplicate taxonomy name {name:?}"));
            }
        }
        Ok(Self { entries })
    }

    /// Names only. Names from the default list keep their keywords; others
    /// use the tokens of the name itself.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, String> {
        let defaults = Self::default();
        let entries = names
            .iter()
            .map(|n| {
                let name = n.as_ref().trim().to_string();
                let keywords = defaults
                    .entries
                    .iter()
                    .find(|d| d.name.eq_ignore_ascii_case(&name))
                    .map(|d| d.keywords.clone())
                    .unwrap_or_else(|| tokenize(&name));
                TaxonomyEntry { name, keywords }
            })
            .collect();
        Self::new(entries)
    }

    pub fn entries(&self) -> &[TaxonomyEntry] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    /// Case-insensitive membership lookup.
    pub fn category(&self, name: &str) -> Option<Category> {
        let name = name.trim();
        self.entries
            .iter()
            .find(|e| e.name.trim().to_lowercase() == name.to_lowercase())
            .map(|e| Category(e.name.trim().to_string()))
    }

    /// Category with the most keyword hits in `text`; ties go to the earlier
    /// entry. `None` when nothing matches.
    pub fn keyword_match(&self, text: &str) -> Option<Category> {
        let tokens = tokenize(text);
        let mut best: Option<(usize, &TaxonomyEntry)> = None;
        for e in &self.entries {
            let hits = tokens.iter().filter(|t| e.keywords.iter().any(|k| keyword_hits(k, t))).count();
            if hits > 0 && best.is_none_or(|(b, _)| hits > b) {
                best = Some((hits, e));
            }
        }
        best.map(|(_, e)| Category(e.name.trim().to_string()))
    }
}

fn keyword_hits(keyword: &str, token: &str) -> bool {
    match keyword.strip_suffix('*') {
        Some(prefix) => token.starts_with(prefix),
        None => token == keyword,
    }
}
