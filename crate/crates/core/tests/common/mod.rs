//! Fixtures and brute-force oracles shared by the integration tests. The
//! oracles are written from the definitions, not from the library code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::NaiveDate;
use crewline::events::{BusinessEvent, Category, CompanyLink, EnrichedEvent};
use crewline::ingest::CompanyRecord;
use rand::seq::SliceRandom;
use rand::Rng;

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden")
}

pub fn fixture_config() -> PathBuf {
    fixture_dir().join("crewline.toml")
}

/// Run the `crewline` binary.
pub fn crewline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crewline"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Log lines with the `timestamp` field removed.
pub fn logs_without_timestamps(stderr: &[u8]) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(stderr)
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap_or_else(|_| panic!("log line is JSON: {l}"));
            v.as_object_mut().expect("log object").remove("timestamp");
            v
        })
        .collect()
}

// ---------------------------------------------------------------- BM25

/// Score every document against the distinct query terms, straight from the
/// Okapi formula with the Robertson IDF clamped at zero. Documents are
/// whitespace-separated lowercase ASCII words. Returns (doc index, score)
/// for documents containing a query term, best first, ties by index.
pub fn bm25_oracle(docs: &[Vec<String>], query: &[String]) -> Vec<(usize, f64)> {
    let n = docs.len() as f64;
    let avg = docs.iter().map(Vec::len).sum::<usize>() as f64 / n;
    let terms: BTreeSet<&String> = query.iter().collect();
    let mut out = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        let mut score = 0.0;
        let mut hit = false;
        for t in &terms {
            let tf = doc.iter().filter(|w| w == t).count() as f64;
            if tf == 0.0 {
                continue;
            }
            hit = true;
            let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
            let idf = ((n - df + 0.5) / (df + 0.5)).ln().max(0.0);
            score += idf * tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * doc.len() as f64 / avg));
        }
        if hit {
            out.push((i, score));
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

// ---------------------------------------------------------- Jaro-Winkler

/// Textbook Jaro: matches within `max(|a|,|b|)/2 - 1`, greedy left to right,
/// transpositions are half the out-of-order matched pairs.
pub fn jaro_oracle(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    match (a.len(), b.len()) {
        (0, 0) => return 1.0,
        (0, _) | (_, 0) => return 0.0,
        _ => {}
    }
    let range = (a.len().max(b.len()) / 2).saturating_sub(1) as isize;
    let mut a_flag = vec![false; a.len()];
    let mut b_flag = vec![false; b.len()];
    for i in 0..a.len() {
        for j in 0..b.len() {
            if (i as isize - j as isize).abs() <= range && !b_flag[j] && a[i] == b[j] {
                a_flag[i] = true;
                b_flag[j] = true;
                break;
            }
        }
    }
    let am: Vec<char> = (0..a.len()).filter(|&i| a_flag[i]).map(|i| a[i]).collect();
    let bm: Vec<char> = (0..b.len()).filter(|&j| b_flag[j]).map(|j| b[j]).collect();
    let m = am.len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let t = (am.iter().zip(&bm).filter(|(x, y)| x != y).count() / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

pub fn jaro_winkler_oracle(a: &str, b: &str) -> f64 {
    let j = jaro_oracle(a, b);
    if j <= 0.7 {
        return j;
    }
    let l = a.chars().zip(b.chars()).take(4).take_while(|(x, y)| x == y).count() as f64;
    j + l * 0.1 * (1.0 - j)
}

/// Linking decision from the definition: exact normalized keys score 1,
/// otherwise Jaro-Winkler of the keys; best score at or above the threshold
/// wins, ties to the smallest SIREN.
pub fn link_oracle<'a>(mention_key: &str, registry: &'a [(String, String)], threshold: f64) -> Option<(&'a str, f64)> {
    if mention_key.is_empty() {
        return None;
    }
    let mut best: Option<(&str, f64)> = None;
    for (siren, key) in registry {
        let s = if key.is_empty() {
            0.0
        } else if key == mention_key {
            1.0
        } else {
            jaro_winkler_oracle(mention_key, key)
        };
        if s < threshold {
            continue;
        }
        best = match best {
            Some((bs, bscore)) if bscore > s || (bscore == s && bs <= siren.as_str()) => Some((bs, bscore)),
            _ => Some((siren.as_str(), s)),
        };
    }
    best
}

pub fn fixture_registry() -> Vec<CompanyRecord> {
    [("444608442", "Enedis"), ("499232080", "Tageos"), ("849735980", "Thales")]
        .into_iter()
        .map(|(siren, name)| CompanyRecord {
            siren: siren.into(),
            name: name.into(),
            hq_address: String::new(),
            phone: None,
            employees: None,
        })
        .collect()
}

/// A noisy variant of `name`: case changes, accents, a parenthetical, a
/// legal suffix, and at most one character edit.
pub fn perturb(name: &str, rng: &mut impl Rng) -> String {
    let mut s: Vec<char> = name.chars().collect();
    match rng.gen_range(0..4) {
        0 => {}
        1 => {
            let i = rng.gen_range(0..s.len());
            s.remove(i);
        }
        2 => {
            let i = rng.gen_range(0..=s.len());
            s.insert(i, rng.gen_range(b'a'..=b'z') as char);
        }
        _ => {
            let i = rng.gen_range(0..s.len());
            s[i] = rng.gen_range(b'a'..=b'z') as char;
        }
    }
    let mut out: String = s
        .into_iter()
        .map(|c| match (c, rng.gen_bool(0.3)) {
            ('e', true) => 'é',
            ('a', true) => 'à',
            (c, _) if rng.gen_bool(0.3) => c.to_ascii_uppercase(),
            (c, _) => c,
        })
        .collect();
    if rng.gen_bool(0.3) {
        out = out.to_uppercase();
    }
    if rng.gen_bool(0.3) {
        out.push_str(["(PARIS)", " (Courbevoie)", " (35)"].choose(rng).unwrap());
    }
    if rng.gen_bool(0.3) {
        out.push_str([" SA", " S.A.", " SAS", " Inc.", " GmbH"].choose(rng).unwrap());
    }
    out
}

// ----------------------------------------------------------- aggregates

pub const REGIONS_AND_NOISE: &[&str] = &[
    "Brittany",
    "Brest",
    "Montpellier",
    "Provence-Alpes-Côte-d'Azur",
    "Paris",
    "Lyon",
    "Fletcher, USA",
    "Asia",
    "",
];

pub fn category(name: &str) -> Category {
    serde_json::from_value(serde_json::Value::String(name.into())).expect("category from string")
}

pub fn random_event(n: usize, rng: &mut impl Rng) -> EnrichedEvent {
    let date = NaiveDate::from_ymd_opt(2023, rng.gen_range(1..=4), rng.gen_range(1..=28)).unwrap();
    let locations: Vec<String> =
        (0..rng.gen_range(0..3)).map(|_| REGIONS_AND_NOISE.choose(rng).unwrap().to_string()).collect();
    let companies: Vec<String> = (0..rng.gen_range(1..3)).map(|_| ["Enedis", "Tageos", "Thales", "Acme"].choose(rng).unwrap().to_string()).collect();
    let links = if rng.gen_bool(0.5) {
        companies
            .iter()
            .map(|c| {
                let rec = fixture_registry().into_iter().find(|r| r.name == *c);
                CompanyLink {
                    mention: c.clone(),
                    siren: rec.as_ref().map(|r| r.siren.clone()),
                    profile: rec,
                    financial: None,
                    review_snippets: vec![],
                    match_score: 1.0,
                }
            })
            .collect()
    } else {
        vec![]
    };
    let cat = ["Recruitment", "Acquisition", "Photovoltaic", "Production"].choose(rng).unwrap();
    EnrichedEvent {
        event: BusinessEvent {
            id: format!("a-{n}#0"),
            article_id: format!("a-{n}"),
            date,
            summary: String::new(),
            companies,
            persons: vec![],
            locations,
            amounts: vec![],
            context: String::new(),
        },
        links,
        category: if rng.gen_bool(0.1) { None } else { Some(category(cat)) },
    }
}

/// Region for a location list by whole-word lookup in a hand-written alias
/// table covering [`REGIONS_AND_NOISE`].
pub fn region_oracle(locations: &[String]) -> Option<&'static str> {
    locations.iter().find_map(|l| match l.as_str() {
        "Brittany" | "Brest" => Some("Brittany"),
        "Montpellier" => Some("Occitanie"),
        "Provence-Alpes-Côte-d'Azur" => Some("Provence-Alpes-Côte-d'Azur"),
        "Paris" => Some("Île-de-France"),
        "Lyon" => Some("Auvergne-Rhône-Alpes"),
        _ => None,
    })
}

pub struct AggregateOracle {
    pub counts: BTreeMap<String, usize>,
    pub geo: BTreeMap<String, usize>,
    pub unlocated: usize,
    pub focus_ids: Vec<String>,
    pub in_month: usize,
    pub focus_total: usize,
}

pub fn aggregate_oracle(events: &[EnrichedEvent], year: i32, month: u32, focus: &str) -> AggregateOracle {
    use chrono::Datelike;
    let mut o = AggregateOracle {
        counts: BTreeMap::new(),
        geo: BTreeMap::new(),
        unlocated: 0,
        focus_ids: vec![],
        in_month: 0,
        focus_total: 0,
    };
    for e in events {
        if e.event.date.year() != year || e.event.date.month() != month {
            continue;
        }
        o.in_month += 1;
        let cat = e.category.as_ref().map(|c| c.name().to_string()).unwrap_or_else(|| "Uncategorized".into());
        *o.counts.entry(cat.clone()).or_default() += 1;
        if cat == focus {
            o.focus_total += 1;
            o.focus_ids.push(e.event.id.clone());
            match region_oracle(&e.event.locations) {
                Some(r) => *o.geo.entry(r.to_string()).or_default() += 1,
                None => o.unlocated += 1,
            }
        }
    }
    o
}

// ------------------------------------------------------ structured output

/// Filler text with no brackets, braces or backticks.
pub fn noise(rng: &mut impl Rng, max: usize) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,:;!?'-_\n";
    (0..rng.gen_range(0..=max)).map(|_| *ALPHABET.choose(rng).unwrap() as char).collect()
}

pub fn random_json(rng: &mut impl Rng, depth: u32) -> serde_json::Value {
    use serde_json::{json, Value};
    let leaf = |rng: &mut dyn rand::RngCore| -> Value {
        match rng.gen_range(0..5) {
            0 => Value::Null,
            1 => json!(rng.gen_bool(0.5)),
            2 => json!(rng.gen_range(-1000i64..1000)),
            3 => json!(rng.gen_range(-4000i64..4000) as f64 / 4.0),
            _ => json!(["Thales", "{not json}", "a [b] c", "é\"q\""][rng.gen_range(0..4)]),
        }
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    if rng.gen_bool(0.5) {
        Value::Array((0..rng.gen_range(0..4)).map(|_| random_json(rng, depth - 1)).collect())
    } else {
        Value::Object((0..rng.gen_range(0..4)).map(|i| (format!("k{i}"), random_json(rng, depth - 1))).collect())
    }
}

/// A container value (object or array) to embed.
pub fn random_container(rng: &mut impl Rng) -> serde_json::Value {
    loop {
        let v = random_json(rng, 3);
        if v.is_object() || v.is_array() {
            return v;
        }
    }
}
