use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crewline::app::{self, AppError, Overrides, ReportSettings, RunConfig};

#[derive(Parser)]
#[command(name = "crewline", version, about = "Business events from news, enriched and categorized")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Serve model calls from this transcript.
    #[arg(long, global = true)]
    replay: Option<PathBuf>,
    /// Call the configured provider and record every exchange here.
    #[arg(long, global = true)]
    record: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report focus category.
    #[arg(long, global = true)]
    category: Option<String>,
    /// Report month, YYYY-MM.
    #[arg(long, global = true)]
    month: Option<String>,
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// All stages, then the report.
    Run,
    Ingest,
    Extract,
    Enrich,
    Classify,
    /// Report from events.jsonl; no model needed.
    Report,
    /// `run` against a live provider; `--record` is required.
    Record,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .json()
        .with_writer(std::io::stderr)
        .with_max_level(if cli.verbose { tracing::Level::DEBUG } else { tracing::Level::INFO })
        .init();
    match dispatch(&cli) {
        Ok(outcome) => {
            for f in outcome.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn overrides(cli: &Cli) -> Overrides {
    Overrides {
        replay: cli.replay.clone(),
        record: cli.record.clone(),
        out: cli.out.clone(),
        category: cli.category.clone(),
        month: cli.month.clone(),
    }
}

fn config(cli: &Cli) -> Result<RunConfig, AppError> {
    let path = cli.config.as_deref().ok_or_else(|| AppError::Config("--config is required".into()))?;
    RunConfig::load(path, &overrides(cli))
}

fn dispatch(cli: &Cli) -> Result<app::Outcome, AppError> {
    match cli.command {
        Command::Run => app::cmd_run(&config(cli)?),
        Command::Ingest => app::cmd_ingest(&config(cli)?),
        Command::Extract => app::cmd_extract(&config(cli)?),
        Command::Enrich => app::cmd_enrich(&config(cli)?),
        Command::Classify => app::cmd_classify(&config(cli)?),
        Command::Record => {
            if cli.record.is_none() {
                return Err(AppError::Config("record needs --record <transcript>".into()));
            }
            app::cmd_run(&config(cli)?)
        }
        Command::Report => match &cli.config {
            Some(_) => {
                let cfg = config(cli)?;
                app::cmd_report(&cfg.output_dir, cfg.paths.gazetteer.as_deref(), &cfg.report)
            }
            None => {
                let out = cli.out.clone().ok_or_else(|| AppError::Config("report needs --config or --out".into()))?;
                let settings = ReportSettings {
                    category: cli.category.clone(),
                    month: cli.month.as_deref().map(app::parse_month).transpose()?,
                    ..ReportSettings::default()
                };
                app::cmd_report(&out, None, &settings)
            }
        },
    }
}
