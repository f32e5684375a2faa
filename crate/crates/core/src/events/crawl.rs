use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::BusinessEvent;
use crate::crew::{ask_json, build_prompt_within, parse_output, Agent, ContextBlock, OutputKind, Task, TaskError};
use crate::ingest::{parse_date, parse_money, MoneyAmount, NewsArticle};

pub const DEFAULT_BATCH_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationAction {
    /// The whole event was discarded.
    Dropped,
    /// The event was kept without one of its amounts.
    AmountSkipped,
}

/// One line of the validation report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub batch: usize,
    /// Position of the event in the model's reply.
    pub item: usize,
    pub article_id: Option<String>,
    pub action: ValidationAction,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Crawl {
    pub events: Vec<BusinessEvent>,
    pub report: Vec<ValidationEntry>,
}

fn article_block(a: &NewsArticle) -> ContextBlock {
    ContextBlock::new(format!("Article {} ({})", a.id, a.date.format("%Y-%m-%d")), a.body.clone())
}

fn accept_event_array(raw: &str) -> Result<Vec<Value>, TaskError> {
    match parse_output(OutputKind::JsonEvents, raw)? {
        Value::Array(items) => {
            if let Some(i) = items.iter().position(|v| !v.is_object()) {
                return Err(TaskError::Schema(format!("element {i} is not an object")));
            }
            Ok(items)
        }
        _ => unreachable!("parse_output guarantees an array"),
    }
}

/// Extract events from `articles`, `batch_size` articles per model call.
/// Events are returned in article order, then reply order; ids are
/// `<article_id>#<n>` counting from 0 per article.
pub fn crawl_events(
    agent: &Agent,
    task: &Task,
    articles: &[NewsArticle],
    batch_size: usize,
    context: &[ContextBlock],
    context_budget: Option<usize>,
) -> Result<Crawl, TaskError> {
    if batch_size == 0 {
        return Err(TaskError::Stage("batch_size must be positive".into()));
    }
    let batches: Vec<&[NewsArticle]> = articles.chunks(batch_size).collect();
    let replies = agent.llm.map_ordered(&batches, |batch| {
        let mut blocks = context.to_vec();
        blocks.extend(batch.iter().map(article_block));
        let prompt = build_prompt_within(agent, task, &blocks, context_budget);
        ask_json(agent, &prompt, accept_event_array).map(|(_, items)| items)
    });

    let mut kept: Vec<(usize, BusinessEvent)> = Vec::new();
    let mut report = Vec::new();
    for (b, reply) in replies.into_iter().enumerate() {
        let items = reply?;
        let offset = b * batch_size;
        for (item, value) in items.iter().enumerate() {
            let obj = value.as_object().expect("checked by accept_event_array");
            match validate_event(obj, batches[b]) {
                Ok((pos, event, skipped)) => {
                    for reason in skipped {
                        report.push(ValidationEntry {
                            batch: b,
                            item,
                            article_id: Some(event.article_id.clone()),
                            action: ValidationAction::AmountSkipped,
                            reason,
                        });
                    }
                    kept.push((offset + pos, event));
                }
                Err(reason) => report.push(ValidationEntry {
                    batch: b,
                    item,
                    article_id: obj.get("article_id").and_then(Value::as_str).map(str::to_string),
                    action: ValidationAction::Dropped,
                    reason,
                }),
            }
        }
    }
    for entry in &report {
        tracing::warn!(batch = entry.batch, item = entry.item, action = ?entry.action, reason = %entry.reason, "event validation");
    }

    kept.sort_by_key(|(pos, _)| *pos);
    let mut ordinal = 0;
    let mut last = None;
    let events = kept
        .into_iter()
        .map(|(pos, mut e)| {
            if last != Some(pos) {
                ordinal = 0;
                last = Some(pos);
            }
            e.id = format!("{}#{ordinal}", e.article_id);
            ordinal += 1;
            e
        })
        .collect();
    Ok(Crawl { events, report })
}

fn string_list(obj: &Map<String, Value>, field: &str) -> Result<Vec<String>, String> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(|v| match v {
                Value::String(s) if s.trim().is_empty() => None,
                Value::String(s) => Some(Ok(s.trim().to_string())),
                _ => Some(Err(format!("{field} must be an array of strings"))),
            })
            .collect(),
        Some(_) => Err(format!("{field} must be an array of strings")),
    }
}

fn text_field(obj: &Map<String, Value>, field: &str) -> Result<String, String> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(String::new()),
        Some(Value::String(s)) => Ok(s.trim().to_string()),
        Some(_) => Err(format!("{field} must be a string")),
    }
}

fn amount(value: &Value) -> Result<Option<MoneyAmount>, String> {
    match value {
        Value::String(s) => parse_money(s).map_err(|e| e.to_string()),
        Value::Object(_) => serde_json::from_value(value.clone())
            .map(Some)
            .map_err(|e| format!("bad amount object: {e}")),
        other => Err(format!("unsupported amount {other}")),
    }
}

/// Returns the article's position in the batch, the event without its id,
/// and reasons for any skipped amounts.
fn validate_event(
    obj: &Map<String, Value>,
    batch: &[NewsArticle],
) -> Result<(usize, BusinessEvent, Vec<String>), String> {
    let article_id = text_field(obj, "article_id")?;
    let pos = batch
        .iter()
        .position(|a| a.id == article_id)
        .ok_or_else(|| format!("unknown article_id {article_id:?}"))?;
    let article = &batch[pos];

    let companies = string_list(obj, "companies")?;
    if companies.is_empty() {
        return Err("event has no companies".into());
    }
    let date = match text_field(obj, "date")?.as_str() {
        "" => article.date,
        s => parse_date(s).map_err(|_| format!("unparsable date {s:?}"))?,
    };

    let mut amounts = Vec::new();
    let mut skipped = Vec::new();
    match obj.get("amounts") {
        None | Some(Value::Null) => {}
        Some(Value::Array(items)) => {
            for v in items {
                match amount(v) {
                    Ok(Some(a)) => amounts.push(a),
                    Ok(None) => {}
                    Err(reason) => skipped.push(reason),
                }
            }
        }
        Some(_) => return Err("amounts must be an array".into()),
    }

    let event = BusinessEvent {
        id: String::new(),
        article_id,
        date,
        summary: text_field(obj, "summary")?,
        companies,
        persons: string_list(obj, "persons")?,
        locations: string_list(obj, "locations")?,
        amounts,
        context: text_field(obj, "context")?,
    };
    Ok((pos, event, skipped))
}
