use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use super::AppError;
use crate::analytics::{Gazetteer, ReportFormat, YearMonth};
use crate::crew::CrewDefinition;
use crate::events::{PipelineOptions, Taxonomy, DEFAULT_BATCH_SIZE, DEFAULT_LINK_THRESHOLD, DEFAULT_SNIPPETS};
use crate::llm::{LlmConfig, Provider, API_KEY_ENV, DEFAULT_MODEL};
use crate::retrieval::{DEFAULT_CHUNK_OVERLAP, DEFAULT_CHUNK_TOKENS};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    taxonomy: Option<Vec<String>>,
    paths: PathsFile,
    #[serde(default)]
    llm: LlmFile,
    #[serde(default)]
    retrieval: RetrievalSettings,
    #[serde(default)]
    linking: LinkingFile,
    #[serde(default)]
    extraction: ExtractionFile,
    #[serde(default)]
    report: ReportFile,
    #[serde(default)]
    crew: Option<CrewDefinition>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathsFile {
    news: PathBuf,
    companies: PathBuf,
    financials: PathBuf,
    reviews: PathBuf,
    gazetteer: Option<PathBuf>,
    transcript: Option<PathBuf>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LlmFile {
    provider: Provider,
    model: String,
    base_url: Option<String>,
    temperature: f64,
    max_output_tokens: u32,
    timeout_secs: u64,
    max_retries: u32,
    retry_base_ms: u64,
    max_concurrency: usize,
    /// Name of the environment variable holding the API key.
    api_key_env: String,
}

impl Default for LlmFile {
    fn default() -> Self {
        let d = LlmConfig::new(Provider::Replay);
        Self {
            provider: Provider::Replay,
            model: DEFAULT_MODEL.into(),
            base_url: None,
            temperature: d.temperature,
            max_output_tokens: d.max_output_tokens,
            timeout_secs: d.timeout.as_secs(),
            max_retries: d.max_retries,
            retry_base_ms: d.retry_base.as_millis() as u64,
            max_concurrency: d.max_concurrency,
            api_key_env: API_KEY_ENV.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalSettings {
    pub chunk_tokens: usize,
    pub chunk_overlap: usize,
    /// Review snippets attached per linked company.
    pub snippets: usize,
}

impl Default for RetrievalSettings {
    fn default() -> Self {
        Self { chunk_tokens: DEFAULT_CHUNK_TOKENS, chunk_overlap: DEFAULT_CHUNK_OVERLAP, snippets: DEFAULT_SNIPPETS }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LinkingFile {
    threshold: f64,
}

impl Default for LinkingFile {
    fn default() -> Self {
        Self { threshold: DEFAULT_LINK_THRESHOLD }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ExtractionFile {
    batch_size: usize,
}

impl Default for ExtractionFile {
    fn default() -> Self {
        Self { batch_size: DEFAULT_BATCH_SIZE }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    category: Option<String>,
    month: Option<String>,
    #[serde(default = "default_formats")]
    formats: Vec<ReportFormat>,
}

impl Default for ReportFile {
    fn default() -> Self {
        Self { category: None, month: None, formats: default_formats() }
    }
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Json, ReportFormat::Markdown, ReportFormat::CsvBundle]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportSettings {
    /// Focus category; the month's most frequent one when absent.
    pub category: Option<String>,
    /// Report month; the month with most events when absent.
    pub month: Option<YearMonth>,
    pub formats: Vec<ReportFormat>,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self { category: None, month: None, formats: default_formats() }
    }
}

/// How the model is reached for this invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LlmMode {
    /// Whatever `[llm]` says.
    Configured,
    /// Serve responses from a transcript.
    Replay(PathBuf),
    /// Call the configured live endpoint and append every exchange here.
    Record(PathBuf),
}

#[derive(Debug, Clone)]
pub struct CorpusPaths {
    pub news: PathBuf,
    pub companies: PathBuf,
    pub financials: PathBuf,
    pub reviews: PathBuf,
    pub gazetteer: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub replay: Option<PathBuf>,
    pub record: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub category: Option<String>,
    pub month: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub paths: CorpusPaths,
    pub output_dir: PathBuf,
    pub llm: LlmConfig,
    pub mode: LlmMode,
    pub crew: CrewDefinition,
    pub taxonomy: Taxonomy,
    pub retrieval: RetrievalSettings,
    pub link_threshold: f64,
    pub batch_size: usize,
    pub report: ReportSettings,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn must_exist(what: &str, p: &Path) -> Result<(), AppError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(AppError::Config(format!("{what} file not found: {}", p.display())))
    }
}

pub fn parse_month(s: &str) -> Result<YearMonth, AppError> {
    s.parse().map_err(AppError::Config)
}

impl RunConfig {
    /// Read and validate a TOML config. Relative paths resolve against the
    /// config file's directory; override paths are taken as given.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base, overrides)
            .map_err(|e| AppError::Config(format!("{}: {}", path.display(), e.message())))
    }

    pub fn from_toml(text: &str, base: &Path, overrides: &Overrides) -> Result<Self, AppError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;

        let paths = CorpusPaths {
            news: resolve(base, &file.paths.news),
            companies: resolve(base, &file.paths.companies),
            financials: resolve(base, &file.paths.financials),
            reviews: resolve(base, &file.paths.reviews),
            gazetteer: file.paths.gazetteer.as_deref().map(|p| resolve(base, p)),
        };
        must_exist("news", &paths.news)?;
        must_exist("companies", &paths.companies)?;
        must_exist("financials", &paths.financials)?;
        must_exist("reviews", &paths.reviews)?;
        if let Some(g) = &paths.gazetteer {
            must_exist("gazetteer", g)?;
        }

        let output_dir = match (&overrides.out, &file.paths.output_dir) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => resolve(base, o),
            (None, None) => base.join("out"),
        };

        let l = &file.llm;
        let mut llm = LlmConfig::new(l.provider);
        llm.model = l.model.clone();
        if let Some(url) = &l.base_url {
            llm.base_url = url.clone();
        }
        llm.temperature = l.temperature;
        llm.max_output_tokens = l.max_output_tokens;
        llm.timeout = Duration::from_secs(l.timeout_secs);
        llm.max_retries = l.max_retries;
        llm.retry_base = Duration::from_millis(l.retry_base_ms);
        llm.max_concurrency = l.max_concurrency;
        llm.transcript = file.paths.transcript.as_deref().map(|p| resolve(base, p));
        llm.api_key = std::env::var(&l.api_key_env).ok().filter(|k| !k.is_empty());

        let mode = match (&overrides.replay, &overrides.record) {
            (Some(_), Some(_)) => return Err(AppError::Config("--replay and --record are exclusive".into())),
            (Some(r), None) => LlmMode::Replay(r.clone()),
            (None, Some(r)) => {
                if llm.provider == Provider::Replay {
                    return Err(AppError::Config("recording needs a live provider in [llm]".into()));
                }
                LlmMode::Record(r.clone())
            }
            (None, None) => LlmMode::Configured,
        };
        // A replay provider without any transcript is rejected only when a
        // gateway is built, so `report` works from such a config.
        let replayed = match &mode {
            LlmMode::Replay(p) => Some(p),
            LlmMode::Configured if llm.provider == Provider::Replay => llm.transcript.as_ref(),
            _ => None,
        };
        if let Some(p) = replayed {
            must_exist("transcript", p)?;
        }
        LlmConfig { provider: Provider::LocalChat, ..llm.clone() }
            .validate()
            .map_err(|e| AppError::Config(e.to_string()))?;

        let taxonomy = match &file.taxonomy {
            Some(names) => Taxonomy::from_names(names).map_err(AppError::Config)?,
            None => Taxonomy::default(),
        };

        let link_threshold = file.linking.threshold;
        if !(link_threshold > 0.0 && link_threshold <= 1.0) {
            return Err(AppError::Config(format!("link threshold {link_threshold} outside (0, 1]")));
        }
        if file.extraction.batch_size == 0 {
            return Err(AppError::Config("batch_size must be positive".into()));
        }
        let r = file.retrieval;
        if r.chunk_tokens == 0 || r.chunk_overlap >= r.chunk_tokens {
            return Err(AppError::Config(format!(
                "chunk_overlap {} must be below chunk_tokens {}",
                r.chunk_overlap, r.chunk_tokens
            )));
        }
        if r.snippets == 0 {
            return Err(AppError::Config("snippets must be positive".into()));
        }

        let month = match overrides.month.as_deref().or(file.report.month.as_deref()) {
            Some(m) => Some(parse_month(m)?),
            None => None,
        };
        let report = ReportSettings {
            category: overrides.category.clone().or(file.report.category),
            month,
            formats: file.report.formats,
        };

        Ok(Self {
            paths,
            output_dir,
            llm,
            mode,
            crew: file.crew.unwrap_or_else(CrewDefinition::business_events),
            taxonomy,
            retrieval: r,
            link_threshold,
            batch_size: file.extraction.batch_size,
            report,
        })
    }

    pub fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions {
            batch_size: self.batch_size,
            snippets: self.retrieval.snippets,
            link_threshold: self.link_threshold,
        }
    }

    pub fn gazetteer(&self) -> Result<Gazetteer, AppError> {
        load_gazetteer(self.paths.gazetteer.as_deref())
    }
}

pub fn load_gazetteer(path: Option<&Path>) -> Result<Gazetteer, AppError> {
    match path {
        Some(p) => Gazetteer::load(p).map_err(|e| AppError::Config(e.to_string())),
        None => Ok(Gazetteer::french_regions()),
    }
}
