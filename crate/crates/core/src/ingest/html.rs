use std::path::Path;

use super::{read_utf8, IngestError};
use crate::text::collapse_whitespace;

/// Elements whose boundaries separate words in rendered text.
pub(crate) const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "br", "caption", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "head", "header", "hr", "html", "li", "main", "nav", "ol", "option", "p", "pre", "section",
    "table", "tbody", "td", "tfoot", "th", "thead", "title", "tr", "ul",
];

const RAW_TEXT_TAGS: &[&str] = &["script", "style"];

pub fn load_html_text(path: &Path) -> Result<String, IngestError> {
    Ok(html_to_text(&read_utf8(path)?))
}

/// Best-effort HTML to plain text. Drops `script`/`style` contents and
/// comments, strips tags, decodes entities and collapses whitespace. Output
/// never contains `<` or `>`.
pub fn html_to_text(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut text_run = String::new();
    let lower = html.to_ascii_lowercase();
    let bytes = html.as_bytes();
    let mut i = 0;

    let flush = |run: &mut String, out: &mut String| {
        if !run.is_empty() {
            out.push_str(&html_escape::decode_html_entities(run));
            run.clear();
        }
    };

    while i < html.len() {
        if bytes[i] != b'<' {
            let next = html[i..].find('<').map_or(html.len(), |p| i + p);
            text_run.push_str(&html[i..next]);
            i = next;
            continue;
        }
        flush(&mut text_run, &mut out);

        if lower[i..].starts_with("<!--") {
            i = lower[i + 4..].find("-->").map_or(html.len(), |p| i + 4 + p + 3);
            continue;
        }
        if lower[i..].starts_with("<!") || lower[i..].starts_with("<?") {
            i = html[i..].find('>').map_or(html.len(), |p| i + p + 1);
            continue;
        }

        let closing = bytes.get(i + 1) == Some(&b'/');
        let name_start = i + 1 + usize::from(closing);
        let name_len = bytes[name_start..]
            .iter()
            .take_while(|b| b.is_ascii_alphanumeric())
            .count();
        if name_len == 0 || !bytes[name_start].is_ascii_alphabetic() {
            // Not a tag: a stray '<' in text.
            out.push(' ');
            i += 1;
            continue;
        }
        let name = &lower[name_start..name_start + name_len];
        let tag_end = find_tag_end(bytes, name_start + name_len);

        if !closing && RAW_TEXT_TAGS.contains(&name) {
            let close = format!("</{name}");
            i = match lower[tag_end..].find(&close) {
                Some(p) => find_tag_end(bytes, tag_end + p + close.len()),
                None => html.len(),
            };
            out.push(' ');
            continue;
        }
        if BLOCK_TAGS.contains(&name) {
            out.push(' ');
        }
        i = tag_end;
    }
    flush(&mut text_run, &mut out);

    let cleaned: String = out
        .chars()
        .map(|c| if c == '<' || c == '>' { ' ' } else { c })
        .collect();
    collapse_whitespace(&cleaned)
}

/// Index just past the `>` closing a tag, honoring quoted attribute values.
fn find_tag_end(bytes: &[u8], mut i: usize) -> usize {
    let mut quote: Option<u8> = None;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => quote = Some(b),
            None if b == b'>' => return i + 1,
            None => {}
        }
        i += 1;
    }
    bytes.len()
}
