use super::{Agent, ContextBlock, OutputKind, Task};
use crate::llm::ChatMessage;
use crate::retrieval::tokenize;

pub fn format_instruction(kind: OutputKind) -> &'static str {
    match kind {
        OutputKind::FreeText => "Respond in plain text.",
        OutputKind::JsonEvents => {
            "Return only a JSON array of event objects, one per business event, with the fields: \
             \"article_id\" (string, copied from the article heading), \"date\" (M/D/YYYY or YYYY-MM-DD), \
             \"summary\" (string), \"companies\" (array of strings), \"persons\" (array of strings), \
             \"locations\" (array of strings), \"amounts\" (array of strings such as \"€18.1 million\"), \
             \"context\" (short topic hint). Return [] when there are no events."
        }
        OutputKind::JsonEnriched => {
            "Return only a JSON array of the events, each extended with the company data linked to it."
        }
        OutputKind::JsonClassified => {
            "Reply with exactly one category name from the Categories list and nothing else."
        }
    }
}

/// Token count of a context block as the budget sees it.
pub fn context_tokens(block: &ContextBlock) -> usize {
    tokenize(&block.label).len() + tokenize(&block.text).len()
}

/// System message from the agent persona; user message from the task
/// description, each context block under a `### <label>` heading, then the
/// output format instruction.
pub fn build_prompt(agent: &Agent, task: &Task, context: &[ContextBlock]) -> Vec<ChatMessage> {
    build_prompt_within(agent, task, context, None)
}

/// As [`build_prompt`], dropping the oldest context blocks until the rest fit
/// in `budget` tokens. The task description is never dropped.
pub fn build_prompt_within(
    agent: &Agent,
    task: &Task,
    context: &[ContextBlock],
    budget: Option<usize>,
) -> Vec<ChatMessage> {
    let mut first_kept = 0;
    if let Some(budget) = budget {
        let mut total: usize = context.iter().map(context_tokens).sum();
        while total > budget && first_kept < context.len() {
            total -= context_tokens(&context[first_kept]);
            first_kept += 1;
        }
        if first_kept > 0 {
            tracing::debug!(dropped = first_kept, budget, "context truncated");
        }
    }

    let system = format!(
        "# Role\n{}\n\n# Goal\n{}\n\n# Backstory\n{}",
        agent.role.trim(),
        agent.goal.trim(),
        agent.backstory.trim()
    );
    let mut user = task.description.trim().to_string();
    for block in &context[first_kept..] {
        user.push_str("\n\n### ");
        user.push_str(block.label.trim());
        user.push('\n');
        user.push_str(&block.text);
    }
    user.push_str("\n\n");
    user.push_str(format_instruction(task.output_kind));
    vec![ChatMessage::system(system), ChatMessage::user(user)]
}
