use std::collections::BTreeMap;

use super::{link_entity, normalize_company_name, BusinessEvent, CompanyLink, EnrichedEvent, ReviewSnippet};
use crate::ingest::{CompanyRecord, FinancialRecord, ReviewRecord};
use crate::retrieval::{build_index, chunk, Index, RetrievalError, DEFAULT_CHUNK_OVERLAP, DEFAULT_CHUNK_TOKENS};

pub const DEFAULT_SNIPPETS: usize = 3;

/// BM25 index over reviews, chunked one review at a time. Chunk doc ids are
/// `<normalized company>/<review ordinal>`.
#[derive(Debug, Clone)]
pub struct ReviewIndex {
    index: Index,
}

impl ReviewIndex {
    pub fn build(reviews: &[ReviewRecord]) -> Result<Self, RetrievalError> {
        Self::build_with(reviews, DEFAULT_CHUNK_TOKENS, DEFAULT_CHUNK_OVERLAP)
    }

    pub fn build_with(reviews: &[ReviewRecord], max_tokens: usize, overlap: usize) -> Result<Self, RetrievalError> {
        let mut per_company: BTreeMap<String, usize> = BTreeMap::new();
        let mut chunks = Vec::new();
        for review in reviews {
            let key = normalize_company_name(&review.company_name);
            if key.is_empty() {
                continue;
            }
            let n = per_company.entry(key.clone()).or_default();
            chunks.extend(chunk(&format!("{key}/{n:06}"), &review.text, max_tokens, overlap)?);
            *n += 1;
        }
        Ok(Self { index: build_index(chunks)? })
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    /// Top `k` chunks of `company_key`'s reviews for `query`. Ranking runs
    /// over the whole index so scores do not depend on the filter.
    pub fn snippets(&self, company_key: &str, query: &str, k: usize) -> Vec<ReviewSnippet> {
        if company_key.is_empty() || k == 0 {
            return Vec::new();
        }
        self.index
            .retrieve(query, self.index.chunk_count())
            .into_iter()
            .filter(|h| h.chunk.doc_id.rsplit_once('/').is_some_and(|(c, _)| c == company_key))
            .take(k)
            .map(|h| ReviewSnippet {
                text: self.index.chunk(&h.chunk).expect("hit refers to indexed chunk").text.clone(),
                score: h.score,
            })
            .collect()
    }
}

/// Reference data an event is joined against.
#[derive(Debug, Clone)]
pub struct EnrichmentSources {
    pub companies: Vec<CompanyRecord>,
    pub financials: Vec<FinancialRecord>,
    pub reviews: ReviewIndex,
}

impl EnrichmentSources {
    pub fn new(
        companies: Vec<CompanyRecord>,
        financials: Vec<FinancialRecord>,
        reviews: &[ReviewRecord],
    ) -> Result<Self, RetrievalError> {
        Ok(Self { companies, financials, reviews: ReviewIndex::build(reviews)? })
    }

    /// Latest fiscal year whose company name normalizes to `key`.
    pub fn financial_for(&self, key: &str) -> Option<&FinancialRecord> {
        if key.is_empty() {
            return None;
        }
        self.financials
            .iter()
            .filter(|f| normalize_company_name(&f.company_name) == key)
            .max_by_key(|f| f.fiscal_year)
    }
}

/// One link per distinct normalized mention, in mention order. Never fails;
/// missing data leaves fields empty.
pub fn enrich_event(event: &BusinessEvent, sources: &EnrichmentSources, k: usize, threshold: f64) -> EnrichedEvent {
    let mut seen = Vec::new();
    let mut links = Vec::new();
    for mention in &event.companies {
        let mention_key = normalize_company_name(mention);
        if seen.contains(&mention_key) {
            continue;
        }
        seen.push(mention_key.clone());

        let linked = link_entity(mention, &sources.companies, threshold);
        let key = match linked {
            Some((record, _)) => normalize_company_name(&record.name),
            None => mention_key,
        };
        let query = format!("{mention} {}", event.summary);
        links.push(CompanyLink {
            mention: mention.clone(),
            siren: linked.map(|(r, _)| r.siren.clone()),
            profile: linked.map(|(r, _)| r.clone()),
            financial: sources.financial_for(&key).cloned(),
            review_snippets: sources.reviews.snippets(&key, &query, k),
            match_score: linked.map_or(0.0, |(_, s)| s),
        });
    }
    EnrichedEvent { event: event.clone(), links, category: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::MoneyAmount;
    use chrono::NaiveDate;

    fn sources() -> EnrichmentSources {
        let company = |siren: &str, name: &str| CompanyRecord {
            siren: siren.into(),
            name: name.into(),
            hq_address: format!("{name} HQ"),
            phone: None,
            employees: None,
        };
        let fin = |name: &str, cents: Option<u64>, year| FinancialRecord {
            company_name: name.into(),
            turnover: cents.map(MoneyAmount::eur_cents),
            fiscal_year: year,
        };
        let review = |name: &str, text: &str| ReviewRecord { company_name: name.into(), text: text.into() };
        EnrichmentSources::new(
            vec![company("444608442", "Enedis"), company("499232080", "Tageos")],
            vec![fin("ENEDIS", Some(1), 2021), fin("Enedis", Some(2), 2022), fin("Tageos", None, 2022)],
            &[
                review("Enedis", "Fast troubleshooting team on site"),
                review("Enedis", "Pleasant advisors on the phone"),
                review("Tageos", "Leader in RFID tags, troubleshooting experts"),
            ],
        )
        .unwrap()
    }

    fn event(companies: &[&str], summary: &str) -> BusinessEvent {
        BusinessEvent {
            id: "n-0#0".into(),
            article_id: "n-0".into(),
            date: NaiveDate::from_ymd_opt(2023, 3, 2).unwrap(),
            summary: summary.into(),
            companies: companies.iter().map(|s| s.to_string()).collect(),
            persons: vec![],
            locations: vec![],
            amounts: vec![],
            context: String::new(),
        }
    }

    #[test]
    fn links_joins_and_filters_reviews() {
        let src = sources();
        let ev = event(&["Enedis (COURBEVOIE)", "Tageos SAS", "Nobody"], "troubleshooting advisors phone");
        let e = enrich_event(&ev, &src, 3, 0.9);
        assert_eq!(e.event, ev);
        assert_eq!(e.links.len(), 3);

        let enedis = &e.links[0];
        assert_eq!(enedis.siren.as_deref(), Some("444608442"));
        assert_eq!(enedis.match_score, 1.0);
        assert_eq!(enedis.financial.as_ref().unwrap().fiscal_year, 2022);
        assert_eq!(enedis.review_snippets.len(), 2);
        // "troubleshooting" appears in 2 of 3 reviews, so its IDF floors at 0.
        assert!(enedis.review_snippets[0].text.contains("advisors"));
        assert!(enedis.review_snippets[0].score > enedis.review_snippets[1].score);

        let tageos = &e.links[1];
        assert!(tageos.financial.as_ref().unwrap().turnover.is_none());
        assert_eq!(tageos.review_snippets.len(), 1);

        let nobody = &e.links[2];
        assert_eq!((nobody.siren.as_ref(), nobody.profile.as_ref(), nobody.match_score), (None, None, 0.0));
        assert!(nobody.review_snippets.is_empty() && nobody.financial.is_none());
    }

    #[test]
    fn k_bounds_snippets_and_duplicates_collapse() {
        let src = sources();
        let e = enrich_event(&event(&["Enedis", "ENEDIS"], "team advisors"), &src, 1, 0.9);
        assert_eq!(e.links.len(), 1);
        assert_eq!(e.links[0].review_snippets.len(), 1);
    }

    #[test]
    fn empty_registry_leaves_links_unmatched() {
        let src = EnrichmentSources::new(vec![], vec![], &[]).unwrap();
        let e = enrich_event(&event(&["Enedis"], "x"), &src, 3, 0.9);
        assert_eq!(e.links[0].siren, None);
    }
}
