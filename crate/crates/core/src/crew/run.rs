use serde::Serialize;
use serde_json::Value;

use super::{build_prompt_within, Agent, ContextBlock, Crew, CrewError, OutputKind, Task, TaskError};
use crate::llm::{extract_json, ChatMessage, JsonExtractError, LlmError};

/// Everything a runner needs to perform one task.
#[derive(Debug)]
pub struct TaskStep<'a> {
    pub index: usize,
    pub agent: &'a Agent,
    pub task: &'a Task,
    /// Initial context followed by every earlier task's raw output.
    pub context: &'a [ContextBlock],
    pub context_budget: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskOutput {
    pub raw: String,
    pub value: Value,
}

pub trait TaskRunner {
    fn run(&mut self, step: &TaskStep<'_>) -> Result<TaskOutput, TaskError>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRecord {
    pub index: usize,
    pub agent_role: String,
    pub raw: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrewResult {
    pub per_task: Vec<TaskRecord>,
}

impl CrewResult {
    /// Output of the last task.
    pub fn final_output(&self) -> &TaskRecord {
        self.per_task.last().expect("a crew has at least one task")
    }
}

/// Interpret raw model text according to the task's output kind.
pub fn parse_output(kind: OutputKind, raw: &str) -> Result<Value, TaskError> {
    match kind {
        OutputKind::FreeText => Ok(Value::String(raw.to_string())),
        OutputKind::JsonEvents | OutputKind::JsonEnriched => match extract_json(raw)? {
            v @ Value::Array(_) => Ok(v),
            other => Err(TaskError::Schema(format!("expected a JSON array, got {}", kind_name(&other)))),
        },
        // A bare category name is a valid classification reply.
        OutputKind::JsonClassified => match extract_json(raw) {
            Ok(v) => Ok(v),
            Err(JsonExtractError::NoJsonFound) => Ok(Value::String(raw.trim().to_string())),
            Err(e) => Err(e.into()),
        },
    }
}

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// Ask again after an unusable reply, showing the model its own output and
/// the error.
pub fn reprompt_on_bad_json(
    agent: &Agent,
    prompt: &[ChatMessage],
    bad_output: &str,
    error: &str,
) -> Result<String, LlmError> {
    let mut messages = prompt.to_vec();
    messages.push(ChatMessage::assistant(bad_output));
    messages.push(ChatMessage::user(format!(
        "Your previous reply could not be used: {error}. Return only valid JSON in the requested format."
    )));
    agent.llm.complete(&messages)
}

/// Complete `prompt`, then `accept` the reply. One reprompt on rejection;
/// a second rejection is returned as the error.
pub fn ask_json<T>(
    agent: &Agent,
    prompt: &[ChatMessage],
    accept: impl Fn(&str) -> Result<T, TaskError>,
) -> Result<(String, T), TaskError> {
    let raw = agent.llm.complete(prompt)?;
    match accept(&raw) {
        Ok(v) => Ok((raw, v)),
        Err(first) => {
            tracing::warn!(role = %agent.role, error = %first, "unusable reply, reprompting");
            let retry = reprompt_on_bad_json(agent, prompt, &raw, &first.to_string())?;
            let v = accept(&retry)?;
            Ok((retry, v))
        }
    }
}

/// Prompt the task's agent once and parse by output kind.
#[derive(Debug, Default, Clone, Copy)]
pub struct LlmTaskRunner;

impl TaskRunner for LlmTaskRunner {
    fn run(&mut self, step: &TaskStep<'_>) -> Result<TaskOutput, TaskError> {
        let prompt = build_prompt_within(step.agent, step.task, step.context, step.context_budget);
        let kind = step.task.output_kind;
        if kind == OutputKind::FreeText {
            let raw = step.agent.llm.complete(&prompt)?;
            return Ok(TaskOutput { value: Value::String(raw.clone()), raw });
        }
        let (raw, value) = ask_json(step.agent, &prompt, |r| parse_output(kind, r))?;
        Ok(TaskOutput { raw, value })
    }
}

pub fn run_crew(crew: &Crew, initial_context: &[ContextBlock]) -> Result<CrewResult, CrewError> {
    run_crew_with(crew, initial_context, &mut LlmTaskRunner)
}

/// Run every task in order. Task i sees the initial context plus the raw
/// output of tasks 0..i, each labelled with its agent's role.
pub fn run_crew_with(
    crew: &Crew,
    initial_context: &[ContextBlock],
    runner: &mut dyn TaskRunner,
) -> Result<CrewResult, CrewError> {
    let mut context = initial_context.to_vec();
    let mut per_task = Vec::with_capacity(crew.tasks().len());
    for (index, task) in crew.tasks().iter().enumerate() {
        let agent = crew.agent_for(task);
        tracing::info!(task = index, role = %agent.role, "task started");
        let step = TaskStep { index, agent, task, context: &context, context_budget: crew.context_budget };
        let out = runner.run(&step).map_err(|cause| {
            tracing::error!(task = index, role = %agent.role, error = %cause, "task failed");
            CrewError::TaskFailed { index, cause }
        })?;
        tracing::info!(task = index, role = %agent.role, bytes = out.raw.len(), "task finished");
        context.push(ContextBlock::new(agent.role.clone(), out.raw.clone()));
        per_task.push(TaskRecord { index, agent_role: agent.role.clone(), raw: out.raw, value: out.value });
    }
    Ok(CrewResult { per_task })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crew::{CrewDefinition, Process};
    use crate::llm::{ChatRequest, Gateway, LlmConfig, ScriptedBackend};
    use std::sync::{Arc, Mutex};

    fn crew_with(kinds: &[OutputKind], gw: Gateway) -> Crew {
        let gw = Arc::new(gw);
        let agent = Agent::new("Writer", "Write things", "Writes.", gw).unwrap();
        let tasks = kinds
            .iter()
            .enumerate()
            .map(|(i, &k)| Task { description: format!("Task {i}"), agent_role: "Writer".into(), output_kind: k })
            .collect();
        Crew::new(vec![agent], tasks, Process::Sequential).unwrap()
    }

    #[test]
    fn single_free_text_task() {
        let crew = crew_with(&[OutputKind::FreeText], Gateway::with_backend(&LlmConfig::default(), ScriptedBackend::new(["hello there"])));
        let r = run_crew(&crew, &[]).unwrap();
        assert_eq!(r.final_output().raw, "hello there");
        assert_eq!(r.final_output().value, Value::String("hello there".into()));
    }

    #[test]
    fn later_tasks_see_earlier_outputs() {
        let seen = Arc::new(Mutex::new(Vec::new()));
        let s = seen.clone();
        let gw = Gateway::with_backend(&LlmConfig::default(), move |r: &ChatRequest<'_>| {
            let user = r.messages.last().unwrap().content.clone();
            let mut seen = s.lock().unwrap();
            seen.push(user);
            Ok(format!("output {}", seen.len()))
        });
        let crew = crew_with(&[OutputKind::FreeText, OutputKind::FreeText, OutputKind::FreeText], gw);
        let r = run_crew(&crew, &[ContextBlock::new("Seed", "s")]).unwrap();
        assert_eq!(r.per_task.len(), 3);
        let seen = seen.lock().unwrap();
        assert!(seen[0].contains("### Seed\ns") && !seen[0].contains("output"));
        assert!(seen[1].contains("### Writer\noutput 1"));
        assert!(seen[2].contains("output 1") && seen[2].contains("output 2"));
        assert!(seen[2].find("output 1").unwrap() < seen[2].find("output 2").unwrap());
    }

    #[test]
    fn bad_json_reprompted_once() {
        let gw = Gateway::with_backend(&LlmConfig::default(), ScriptedBackend::new(["not json", "```json\n[{\"a\":1}]\n```"]));
        let crew = crew_with(&[OutputKind::JsonEvents], gw);
        let r = run_crew(&crew, &[]).unwrap();
        assert_eq!(r.final_output().value, serde_json::json!([{"a": 1}]));
        assert_eq!(crew.agents()[0].llm.call_count(), 2);
    }

    #[test]
    fn second_bad_json_fails_task() {
        let gw = Gateway::with_backend(&LlmConfig::default(), ScriptedBackend::new(["nope", "{\"still\": \"object\"}", "unused"]));
        let crew = crew_with(&[OutputKind::JsonEvents], gw);
        match run_crew(&crew, &[]) {
            Err(CrewError::TaskFailed { index: 0, cause: TaskError::Schema(_) }) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(crew.agents()[0].llm.call_count(), 2);
    }

    #[test]
    fn gateway_failure_names_task() {
        let gw = Gateway::with_backend(&LlmConfig::default(), ScriptedBackend::new(["first"]));
        let crew = crew_with(&[OutputKind::FreeText, OutputKind::FreeText], gw);
        match run_crew(&crew, &[]) {
            Err(CrewError::TaskFailed { index: 1, cause: TaskError::Llm(LlmError::ReplayExhausted { .. }) }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classification_accepts_bare_name() {
        assert_eq!(parse_output(OutputKind::JsonClassified, " Recruitment\n").unwrap(), Value::String("Recruitment".into()));
        assert_eq!(
            parse_output(OutputKind::JsonClassified, "{\"category\":\"Acquisition\"}").unwrap(),
            serde_json::json!({"category": "Acquisition"})
        );
    }

    #[test]
    fn custom_runner_drives_default_crew() {
        struct Echo;
        impl TaskRunner for Echo {
            fn run(&mut self, step: &TaskStep<'_>) -> Result<TaskOutput, TaskError> {
                let raw = format!("{}:{}", step.agent.role, step.context.len());
                Ok(TaskOutput { value: Value::String(raw.clone()), raw })
            }
        }
        let gw = Arc::new(Gateway::with_backend(&LlmConfig::default(), ScriptedBackend::new(Vec::<String>::new())));
        let crew = CrewDefinition::business_events().build(gw).unwrap();
        let r = run_crew_with(&crew, &[], &mut Echo).unwrap();
        let raws: Vec<_> = r.per_task.iter().map(|t| t.raw.as_str()).collect();
        assert_eq!(raws, ["Events Crawler:0", "Events Enrichment:1", "Events Explorer:2"]);
    }
}
