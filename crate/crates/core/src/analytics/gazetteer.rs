use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::match_key;

const FRENCH_REGIONS: &str = include_str!("../../data/regions-fr.toml");

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("cannot read gazetteer {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid gazetteer: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
}

/// Region names with alias sets, tried in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gazetteer {
    regions: Vec<Region>,
    /// Per region: padded match keys of the name and every alias.
    keys: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct File {
    regions: Vec<Region>,
}

fn padded(s: &str) -> String {
    format!(" {} ", match_key(s))
}

impl Gazetteer {
    pub fn new(regions: Vec<Region>) -> Result<Self, GazetteerError> {
        let mut keys = Vec::with_capacity(regions.len());
        for r in &regions {
            if match_key(&r.name).is_empty() {
                return Err(GazetteerError::Invalid(format!("region name {:?} has no letters or digits", r.name)));
            }
            keys.push(
                std::iter::once(&r.name)
                    .chain(&r.aliases)
                    .map(|a| padded(a))
                    .filter(|k| k.trim() != "")
                    .collect(),
            );
        }
        Ok(Self { regions, keys })
    }

    pub fn from_toml(text: &str) -> Result<Self, GazetteerError> {
        let file: File = toml::from_str(text).map_err(|e| GazetteerError::Invalid(e.to_string()))?;
        Self::new(file.regions)
    }

    pub fn load(path: &Path) -> Result<Self, GazetteerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| GazetteerError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    /// The 13 metropolitan French regions.
    pub fn french_regions() -> Self {
        Self::from_toml(FRENCH_REGIONS).expect("shipped gazetteer parses")
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Region whose name or alias occurs in `location` as whole words.
    pub fn resolve(&self, location: &str) -> Option<&str> {
        let loc = padded(location);
        if loc.trim().is_empty() {
            return None;
        }
        self.keys
            .iter()
            .position(|ks| ks.iter().any(|k| loc.contains(k.as_str())))
            .map(|i| self.regions[i].name.as_str())
    }

    /// First location that resolves.
    pub fn resolve_any<S: AsRef<str>>(&self, locations: &[S]) -> Option<&str> {
        locations.iter().find_map(|l| self.resolve(l.as_ref()))
    }
}
