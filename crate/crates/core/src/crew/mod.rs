//! Agents, tasks and a crew that runs its tasks sequentially, handing every
//! task's full output forward as labelled context.

mod prompt;
mod run;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{Gateway, JsonExtractError, LlmError};

pub use prompt::{build_prompt, build_prompt_within, context_tokens, format_instruction};
pub use run::{
    ask_json, parse_output, reprompt_on_bad_json, run_crew, run_crew_with, CrewResult, LlmTaskRunner,
    TaskOutput, TaskRecord, TaskRunner, TaskStep,
};

#[derive(Debug, Error)]
pub enum CrewError {
    #[error("invalid crew: {0}")]
    InvalidCrew(String),
    #[error("task {index} failed: {cause}")]
    TaskFailed { index: usize, cause: TaskError },
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Json(#[from] JsonExtractError),
    #[error("output does not match the expected schema: {0}")]
    Schema(String),
    #[error("{0}")]
    Stage(String),
}

impl TaskError {
    pub fn llm(&self) -> Option<&LlmError> {
        match self {
            TaskError::Llm(e) => Some(e),
            _ => None,
        }
    }
}

/// An LLM persona: what it is, what it wants and why.
#[derive(Clone)]
pub struct Agent {
    pub role: String,
    pub goal: String,
    pub backstory: String,
    pub llm: Arc<Gateway>,
}

impl std::fmt::Debug for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Agent").field("role", &self.role).field("goal", &self.goal).finish()
    }
}

impl Agent {
    pub fn new(
        role: impl Into<String>,
        goal: impl Into<String>,
        backstory: impl Into<String>,
        llm: Arc<Gateway>,
    ) -> Result<Self, CrewError> {
        let agent = Self { role: role.into(), goal: goal.into(), backstory: backstory.into(), llm };
        for (field, value) in [("role", &agent.role), ("goal", &agent.goal), ("backstory", &agent.backstory)] {
            if value.trim().is_empty() {
                return Err(CrewError::InvalidCrew(format!("agent {field} must not be empty")));
            }
        }
        Ok(agent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    FreeText,
    JsonEvents,
    JsonEnriched,
    JsonClassified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub description: String,
    /// Role of the agent that performs this task.
    pub agent_role: String,
    pub output_kind: OutputKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    #[default]
    Sequential,
}

#[derive(Debug, Clone)]
pub struct Crew {
    agents: Vec<Agent>,
    tasks: Vec<Task>,
    process: Process,
    /// Optional cap on context tokens per prompt; oldest blocks go first.
    pub context_budget: Option<usize>,
}

impl Crew {
    pub fn new(agents: Vec<Agent>, tasks: Vec<Task>, process: Process) -> Result<Self, CrewError> {
        if tasks.is_empty() {
            return Err(CrewError::InvalidCrew("a crew needs at least one task".into()));
        }
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].iter().any(|b| b.role == a.role) {
                return Err(CrewError::InvalidCrew(format!("duplicate agent role {:?}", a.role)));
            }
        }
        for (i, t) in tasks.iter().enumerate() {
            if t.description.trim().is_empty() {
                return Err(CrewError::InvalidCrew(format!("task {i} has an empty description")));
            }
            if !agents.iter().any(|a| a.role == t.agent_role) {
                return Err(CrewError::InvalidCrew(format!(
                    "task {i} refers to unknown agent {:?}",
                    t.agent_role
                )));
            }
        }
        Ok(Self { agents, tasks, process, context_budget: None })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn process(&self) -> Process {
        self.process
    }

    pub fn agent_for(&self, task: &Task) -> &Agent {
        self.agents
            .iter()
            .find(|a| a.role == task.agent_role)
            .expect("validated at construction")
    }

    /// The same crew restricted to tasks of the given kinds, order kept.
    pub fn subset(&self, kinds: &[OutputKind]) -> Result<Self, CrewError> {
        let tasks = self.tasks.iter().filter(|t| kinds.contains(&t.output_kind)).cloned().collect();
        let mut crew = Self::new(self.agents.clone(), tasks, self.process)?;
        crew.context_budget = self.context_budget;
        Ok(crew)
    }
}

/// Serializable agent persona, without the model binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub role: String,
    pub goal: String,
    pub backstory: String,
}

/// Declarative crew: what a config file describes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrewDefinition {
    pub agents: Vec<AgentSpec>,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub process: Process,
}

impl CrewDefinition {
    /// Crawler, enrichment and explorer agents with their three tasks.
    pub fn business_events() -> Self {
        let agent = |role: &str, goal: &str, backstory: &str| AgentSpec {
            role: role.into(),
            goal: goal.into(),
            backstory: backstory.into(),
        };
        let task = |description: &str, role: &str, kind| Task {
            description: description.into(),
            agent_role: role.into(),
            output_kind: kind,
        };
        Self {
            agents: vec![
                agent(
                    "Events Crawler",
                    "Load news data and extract business events with named entities.",
                    "Business news articles contain entities such as company names, individuals, contextual information, dates, and locations.",
                ),
                agent(
                    "Events Enrichment",
                    "Utilize Financial data, Internal Company data, and Consumer reviews data.",
                    "Associating the entities identified in the news events with their corresponding data.",
                ),
                agent(
                    "Events Explorer",
                    "Display categorized business events.",
                    "Business events must be classified according to their topics.",
                ),
            ],
            tasks: vec![
                task("Gather events data", "Events Crawler", OutputKind::JsonEvents),
                task("Enrich the data", "Events Enrichment", OutputKind::JsonEnriched),
                task("Classify the events", "Events Explorer", OutputKind::JsonClassified),
            ],
            process: Process::Sequential,
        }
    }

    pub fn build(&self, llm: Arc<Gateway>) -> Result<Crew, CrewError> {
        let agents = self
            .agents
            .iter()
            .map(|a| Agent::new(&a.role, &a.goal, &a.backstory, llm.clone()))
            .collect::<Result<_, _>>()?;
        Crew::new(agents, self.tasks.clone(), self.process)
    }
}

/// A labelled block of prompt context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBlock {
    pub label: String,
    pub text: String,
}

impl ContextBlock {
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Self {
        Self { label: label.into(), text: text.into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{LlmConfig, ScriptedBackend};

    fn gw() -> Arc<Gateway> {
        Arc::new(Gateway::with_backend(&LlmConfig::default(), ScriptedBackend::new(Vec::<String>::new())))
    }

    #[test]
    fn default_definition_builds() {
        let crew = CrewDefinition::business_events().build(gw()).unwrap();
        assert_eq!(crew.agents().len(), 3);
        assert_eq!(crew.tasks()[2].output_kind, OutputKind::JsonClassified);
        assert_eq!(crew.agent_for(&crew.tasks()[0]).role, "Events Crawler");
    }

    #[test]
    fn unknown_agent_rejected() {
        let mut def = CrewDefinition::business_events();
        def.tasks[1].agent_role = "Nobody".into();
        assert!(matches!(def.build(gw()), Err(CrewError::InvalidCrew(_))));
    }

    #[test]
    fn empty_persona_rejected() {
        assert!(Agent::new("r", " ", "b", gw()).is_err());
    }

    #[test]
    fn subset_keeps_order() {
        let crew = CrewDefinition::business_events().build(gw()).unwrap();
        let sub = crew.subset(&[OutputKind::JsonClassified, OutputKind::JsonEvents]).unwrap();
        let kinds: Vec<_> = sub.tasks().iter().map(|t| t.output_kind).collect();
        assert_eq!(kinds, [OutputKind::JsonEvents, OutputKind::JsonClassified]);
    }

    #[test]
    fn definition_deserializes_from_toml() {
        let def: CrewDefinition = toml::from_str(
            r#"
            process = "sequential"
            [[agents]]
            role = "Writer"
            goal = "Write"
            backstory = "Writes things."
            [[tasks]]
            description = "Say hi"
            agent_role = "Writer"
            output_kind = "free_text"
            "#,
        )
        .unwrap();
        assert_eq!(def.tasks[0].output_kind, OutputKind::FreeText);
    }
}
