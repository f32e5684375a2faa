use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JsonExtractError {
    #[error("no JSON object or array found")]
    NoJsonFound,
    #[error("invalid JSON at byte {position}: {message}")]
    JsonSyntax { position: usize, message: String },
}

/// Pull the first JSON object or array out of model text.
///
/// Markdown code fences are stripped first (the first fenced block wins).
/// The first balanced `{...}` or `[...]` region is then parsed strictly;
/// there is no repair of broken JSON.
pub fn extract_json(text: &str) -> Result<Value, JsonExtractError> {
    let (body, body_offset) = strip_fence(text);
    let start = body
        .find(['{', '['])
        .ok_or(JsonExtractError::NoJsonFound)?;
    let region = &body[start..];
    let end = balanced_end(region).ok_or_else(|| JsonExtractError::JsonSyntax {
        position: body_offset + body.len(),
        message: "unbalanced brackets".into(),
    })?;
    let candidate = &region[..end];
    serde_json::from_str(candidate).map_err(|e| JsonExtractError::JsonSyntax {
        position: body_offset + start + line_col_offset(candidate, e.line(), e.column()),
        message: e.to_string(),
    })
}

/// Contents of the first ``` fenced block, or the whole text.
fn strip_fence(text: &str) -> (&str, usize) {
    let Some(open) = text.find("```") else {
        return (text, 0);
    };
    let after = open + 3;
    // Skip the info string ("json") up to the end of the fence line.
    let content_start = text[after..].find('\n').map_or(text.len(), |p| after + p + 1);
    let content_end = text[content_start..]
        .find("```")
        .map_or(text.len(), |p| content_start + p);
    (&text[content_start..content_end], content_start)
}

/// Byte length of the bracketed region starting at `s[0]`, string-aware.
fn balanced_end(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, ch) in s.char_indices() {
        if in_string {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '{' | '[' => depth += 1,
            '}' | ']' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

fn line_col_offset(s: &str, line: usize, column: usize) -> usize {
    let line_start: usize = s.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (line_start + column.saturating_sub(1)).min(s.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn fenced() {
        assert_eq!(extract_json("```json\n{\"a\":1}\n```").unwrap(), json!({"a": 1}));
        assert_eq!(extract_json("Sure:\n```\n[1, 2]\n```\nThanks").unwrap(), json!([1, 2]));
    }

    #[test]
    fn embedded_in_prose() {
        let v = extract_json("Here are the events: [{\"date\":\"3/2/2023\"}] done.").unwrap();
        assert_eq!(v, json!([{"date": "3/2/2023"}]));
    }

    #[test]
    fn strings_with_brackets() {
        let v = extract_json(r#"x {"a": "}]{[", "b": "quote \" }"} y"#).unwrap();
        assert_eq!(v["a"], "}]{[");
    }

    #[test]
    fn nothing_found() {
        assert_eq!(extract_json("no braces here"), Err(JsonExtractError::NoJsonFound));
        assert_eq!(extract_json(""), Err(JsonExtractError::NoJsonFound));
    }

    #[test]
    fn broken_json_is_syntax_error() {
        assert!(matches!(
            extract_json("Sure! events: {\"a\": [1, 2"),
            Err(JsonExtractError::JsonSyntax { .. })
        ));
        match extract_json("ok {\"a\": tru}") {
            Err(JsonExtractError::JsonSyntax { position, .. }) => assert!((4..14).contains(&position)),
            other => panic!("{other:?}"),
        }
    }

    fn arb_json() -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            Just(Value::Null),
            any::<bool>().prop_map(Value::Bool),
            any::<i64>().prop_map(|n| json!(n)),
            "[a-z{}\\[\\]\"\\\\ é]{0,8}".prop_map(Value::String),
        ];
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..4).prop_map(Value::Array),
                proptest::collection::btree_map("[a-z]{1,5}", inner, 0..4)
                    .prop_map(|m| Value::Object(m.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn recovers_embedded_value(
            v in arb_json().prop_filter("container", |v| v.is_array() || v.is_object()),
            prefix in "[^{}\\[\\]`]{0,30}",
            suffix in "[^{}\\[\\]`]{0,30}",
            pretty in any::<bool>(),
        ) {
            let body = if pretty { serde_json::to_string_pretty(&v).unwrap() } else { v.to_string() };
            let text = format!("{prefix}{body}{suffix}");
            prop_assert_eq!(extract_json(&text).unwrap(), v);
        }
    }
}
