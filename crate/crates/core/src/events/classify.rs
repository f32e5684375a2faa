use serde_json::Value;

use super::{Category, EnrichedEvent, Taxonomy};
use crate::crew::{build_prompt, parse_output, Agent, ContextBlock, OutputKind, Task};
use crate::llm::{ChatMessage, LlmError};

/// Taxonomy list, then the event's summary and context hint.
pub fn classification_prompt(agent: &Agent, task: &Task, event: &EnrichedEvent, taxonomy: &Taxonomy) -> Vec<ChatMessage> {
    let names: Vec<String> = taxonomy.names().map(|n| format!("- {n}")).collect();
    let e = &event.event;
    let mut text = format!("Summary: {}", e.summary);
    if !e.context.is_empty() {
        text.push_str(&format!("\nContext: {}", e.context));
    }
    let blocks = [ContextBlock::new("Categories", names.join("\n")), ContextBlock::new(format!("Event {}", e.id), text)];
    build_prompt(agent, task, &blocks)
}

/// Map a model reply onto the taxonomy. Accepts a bare name, optionally
/// quoted or ending in a period, or `{"category": name}`.
pub fn resolve_reply(reply: &str, taxonomy: &Taxonomy) -> Option<Category> {
    let name = match parse_output(OutputKind::JsonClassified, reply).ok()? {
        Value::String(s) => s,
        Value::Object(map) => map.get("category")?.as_str()?.to_string(),
        _ => return None,
    };
    let trimmed = name.trim().trim_matches(|c: char| matches!(c, '"' | '\'' | '`' | '.' | '*') || c.is_whitespace());
    taxonomy.category(trimmed)
}

/// Ask the model; fall back to keywords over summary and context, then to
/// `Uncategorized`. Only gateway errors escape.
pub fn classify_event(
    agent: &Agent,
    task: &Task,
    event: &EnrichedEvent,
    taxonomy: &Taxonomy,
) -> Result<Category, LlmError> {
    let reply = agent.llm.complete(&classification_prompt(agent, task, event, taxonomy))?;
    if let Some(c) = resolve_reply(&reply, taxonomy) {
        return Ok(c);
    }
    let text = format!("{} {}", event.event.summary, event.event.context);
    let fallback = taxonomy.keyword_match(&text).unwrap_or_else(Category::uncategorized);
    tracing::warn!(event = %event.event.id, reply = %reply.trim(), fallback = %fallback, "reply outside taxonomy");
    Ok(fallback)
}
