use super::{
    classify_event, crawl_events, enrich_event, to_jsonl, BusinessEvent, EnrichedEvent, EnrichmentSources, Taxonomy,
    ValidationEntry, DEFAULT_BATCH_SIZE, DEFAULT_LINK_THRESHOLD, DEFAULT_SNIPPETS,
};
use crate::crew::{
    run_crew_with, Crew, CrewError, CrewResult, LlmTaskRunner, OutputKind, TaskError, TaskOutput, TaskRunner, TaskStep,
};
use crate::ingest::NewsArticle;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub batch_size: usize,
    pub snippets: usize,
    pub link_threshold: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { batch_size: DEFAULT_BATCH_SIZE, snippets: DEFAULT_SNIPPETS, link_threshold: DEFAULT_LINK_THRESHOLD }
    }
}

/// Task runner that gives each output kind its stage: extraction for
/// `json_events`, the deterministic join for `json_enriched`, per-event
/// classification for `json_classified`. Free-text tasks go to the model.
#[derive(Debug)]
pub struct StageRunner<'a> {
    pub sources: &'a EnrichmentSources,
    pub taxonomy: &'a Taxonomy,
    pub options: PipelineOptions,
    pub articles: Vec<NewsArticle>,
    pub extracted: Option<Vec<BusinessEvent>>,
    pub validation: Vec<ValidationEntry>,
    pub enriched: Option<Vec<EnrichedEvent>>,
}

impl<'a> StageRunner<'a> {
    pub fn new(sources: &'a EnrichmentSources, taxonomy: &'a Taxonomy, options: PipelineOptions) -> Self {
        Self {
            sources,
            taxonomy,
            options,
            articles: Vec::new(),
            extracted: None,
            validation: Vec::new(),
            enriched: None,
        }
    }
}

fn output<T: serde::Serialize>(items: &[T]) -> TaskOutput {
    TaskOutput { raw: to_jsonl(items), value: serde_json::to_value(items).expect("events serialize") }
}

impl TaskRunner for StageRunner<'_> {
    fn run(&mut self, step: &TaskStep<'_>) -> Result<TaskOutput, TaskError> {
        match step.task.output_kind {
            OutputKind::FreeText => LlmTaskRunner.run(step),
            OutputKind::JsonEvents => {
                let crawl = crawl_events(
                    step.agent,
                    step.task,
                    &self.articles,
                    self.options.batch_size,
                    step.context,
                    step.context_budget,
                )?;
                self.validation.extend(crawl.report);
                let out = output(&crawl.events);
                self.extracted = Some(crawl.events);
                Ok(out)
            }
            OutputKind::JsonEnriched => {
                let events = self
                    .extracted
                    .as_ref()
                    .ok_or_else(|| TaskError::Stage("enrichment needs extracted events".into()))?;
                let enriched: Vec<EnrichedEvent> = events
                    .iter()
                    .map(|e| enrich_event(e, self.sources, self.options.snippets, self.options.link_threshold))
                    .collect();
                let out = output(&enriched);
                self.enriched = Some(enriched);
                Ok(out)
            }
            OutputKind::JsonClassified => {
                let enriched = self
                    .enriched
                    .as_mut()
                    .ok_or_else(|| TaskError::Stage("classification needs enriched events".into()))?;
                let taxonomy = self.taxonomy;
                let categories = step
                    .agent
                    .llm
                    .map_ordered(enriched, |e| classify_event(step.agent, step.task, e, taxonomy));
                for (e, c) in enriched.iter_mut().zip(categories) {
                    e.category = Some(c?);
                }
                Ok(output(enriched))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub extracted: Vec<BusinessEvent>,
    pub validation: Vec<ValidationEntry>,
    /// Final events, in article order then per-article ordinal.
    pub events: Vec<EnrichedEvent>,
    pub crew: CrewResult,
}

/// Load-extract-enrich-classify through the crew's tasks in order.
pub fn run_pipeline(
    crew: &Crew,
    articles: Vec<NewsArticle>,
    sources: &EnrichmentSources,
    taxonomy: &Taxonomy,
    options: PipelineOptions,
) -> Result<PipelineOutput, CrewError> {
    let mut runner = StageRunner::new(sources, taxonomy, options);
    runner.articles = articles;
    let crew_result = run_crew_with(crew, &[], &mut runner)?;
    let events = match runner.enriched {
        Some(e) => e,
        None => final_events(&crew_result)?,
    };
    Ok(PipelineOutput {
        extracted: runner.extracted.unwrap_or_default(),
        validation: runner.validation,
        events,
        crew: crew_result,
    })
}

fn final_events(result: &CrewResult) -> Result<Vec<EnrichedEvent>, CrewError> {
    let last = result.final_output();
    serde_json::from_value(last.value.clone()).map_err(|e| CrewError::TaskFailed {
        index: last.index,
        cause: TaskError::Schema(format!("final output is not a list of enriched events: {e}")),
    })
}

/// Only the crew's `json_events` tasks.
pub fn extract_stage(
    crew: &Crew,
    articles: Vec<NewsArticle>,
    sources: &EnrichmentSources,
    taxonomy: &Taxonomy,
    options: PipelineOptions,
) -> Result<(Vec<BusinessEvent>, Vec<ValidationEntry>), CrewError> {
    let sub = crew.subset(&[OutputKind::JsonEvents])?;
    let mut runner = StageRunner::new(sources, taxonomy, options);
    runner.articles = articles;
    run_crew_with(&sub, &[], &mut runner)?;
    Ok((runner.extracted.unwrap_or_default(), runner.validation))
}

/// Enrichment is a pure join; no model involved.
pub fn enrich_stage(events: &[BusinessEvent], sources: &EnrichmentSources, options: PipelineOptions) -> Vec<EnrichedEvent> {
    events
        .iter()
        .map(|e| enrich_event(e, sources, options.snippets, options.link_threshold))
        .collect()
}

/// Only the crew's `json_classified` tasks, over already enriched events.
pub fn classify_stage(
    crew: &Crew,
    enriched: Vec<EnrichedEvent>,
    sources: &EnrichmentSources,
    taxonomy: &Taxonomy,
    options: PipelineOptions,
) -> Result<Vec<EnrichedEvent>, CrewError> {
    let sub = crew.subset(&[OutputKind::JsonClassified])?;
    let mut runner = StageRunner::new(sources, taxonomy, options);
    runner.enriched = Some(enriched);
    run_crew_with(&sub, &[], &mut runner)?;
    Ok(runner.enriched.unwrap_or_default())
}
