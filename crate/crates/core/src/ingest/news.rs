use std::path::Path;

use super::{parse_date, read_utf8, IngestError, NewsArticle};

/// Load a news file of blank-line-separated `DATE; body` blocks.
pub fn load_news(path: &Path) -> Result<Vec<NewsArticle>, IngestError> {
    let text = read_utf8(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "news".to_string());
    parse_news(&stem, &text)
}

/// Parse news text. Ids are `<stem>-<block ordinal>`.
pub fn parse_news(stem: &str, text: &str) -> Result<Vec<NewsArticle>, IngestError> {
    let mut blocks: Vec<Vec<&str>> = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }

    blocks
        .iter()
        .enumerate()
        .map(|(block, lines)| {
            let malformed = |reason: String| IngestError::MalformedRecord { block, reason };
            let (date_token, first) = lines[0]
                .split_once(';')
                .ok_or_else(|| malformed("missing `DATE;` header".into()))?;
            let date = parse_date(date_token)
                .map_err(|_| malformed(format!("bad date {:?}", date_token.trim())))?;
            let mut body = first.to_string();
            for line in &lines[1..] {
                body.push('\n');
                body.push_str(line);
            }
            let body = body.trim().to_string();
            if body.is_empty() {
                return Err(malformed("empty body".into()));
            }
            Ok(NewsArticle {
                id: format!("{stem}-{block}"),
                date,
                body,
            })
        })
        .collect()
}

/// Write articles back in the news file format, ISO dates.
pub fn serialize_news(articles: &[NewsArticle]) -> String {
    articles
        .iter()
        .map(|a| format!("{}; {}\n", a.date.format("%Y-%m-%d"), a.body))
        .collect::<Vec<_>>()
        .join("\n")
}
