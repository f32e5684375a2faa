use crate::ingest::CompanyRecord;
use crate::text::{collapse_whitespace, fold_diacritics};

pub const DEFAULT_LINK_THRESHOLD: f64 = 0.90;

const LEGAL_SUFFIXES: [&str; 6] = ["SA", "SAS", "SARL", "GMBH", "INC", "LTD"];

/// Matching key for a company name. An unclosed `(` drops the rest of the
/// string.
pub fn normalize_company_name(text: &str) -> String {
    let folded = fold_diacritics(&text.to_uppercase());
    let mut kept = String::with_capacity(folded.len());
    let mut depth = 0usize;
    for c in folded.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            _ if depth > 0 => {}
            // "S.A." reads as "SA".
            '.' => {}
            c if c.is_alphanumeric() => kept.push(c),
            _ => kept.push(' '),
        }
    }
    let mut tokens: Vec<&str> = kept.split_whitespace().collect();
    while tokens.len() > 1 && tokens.last().is_some_and(|t| LEGAL_SUFFIXES.contains(t)) {
        tokens.pop();
    }
    collapse_whitespace(&tokens.join(" "))
}

pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_used = vec![false; b.len()];
    let mut a_matched = Vec::with_capacity(a.len());
    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_used[j] && b[j] == ca {
                b_used[j] = true;
                a_matched.push(ca);
                break;
            }
        }
    }
    let m = a_matched.len();
    if m == 0 {
        return 0.0;
    }
    let b_matched = b.iter().zip(&b_used).filter(|(_, &u)| u).map(|(c, _)| *c);
    let half_transpositions = a_matched.iter().zip(b_matched).filter(|(x, y)| **x != *y).count();
    let m = m as f64;
    let t = (half_transpositions / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Winkler's prefix boost: scale 0.1, prefix up to 4, applied above 0.7.
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let j = jaro(a, b);
    if j <= 0.7 {
        return j;
    }
    let prefix = a.chars().zip(b.chars()).take(4).take_while(|(x, y)| x == y).count();
    j + 0.1 * prefix as f64 * (1.0 - j)
}

/// Score of `mention` against one registry name.
pub fn link_score(mention_key: &str, record_key: &str) -> f64 {
    if mention_key.is_empty() || record_key.is_empty() {
        0.0
    } else if mention_key == record_key {
        1.0
    } else {
        jaro_winkler(mention_key, record_key)
    }
}

/// Best registry record for `mention`, if it clears `threshold`. Ties go to
/// the smallest SIREN.
pub fn link_entity<'a>(
    mention: &str,
    companies: &'a [CompanyRecord],
    threshold: f64,
) -> Option<(&'a CompanyRecord, f64)> {
    debug_assert!(threshold > 0.0 && threshold <= 1.0);
    let key = normalize_company_name(mention);
    if key.is_empty() {
        return None;
    }
    companies
        .iter()
        .map(|r| (r, link_score(&key, &normalize_company_name(&r.name))))
        .filter(|(_, s)| *s >= threshold)
        .min_by(|(ra, sa), (rb, sb)| sb.total_cmp(sa).then_with(|| ra.siren.cmp(&rb.siren)))
}
