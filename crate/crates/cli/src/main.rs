//! `ontokit`: dataset building, grading and ontology construction.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 output I/O
//! failure, 1 anything else.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ontokit_core::grader::DfsMode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::User(_) => 2,
            CliError::Io(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ontokit", version, about = "Graph-reasoning datasets, grading and ontology construction")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DfsArg {
    Canonical,
    Validity,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the evaluation set and (unless --eval-only) both training stages.
    Dataset {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        eval_only: bool,
        #[arg(long)]
        stage1: Option<usize>,
        #[arg(long)]
        stage2: Option<usize>,
        /// Embed node feature matrices in the JSONL graphs.
        #[arg(long)]
        with_features: bool,
    },
    /// Grade model answers against an evaluation set.
    Grade {
        /// Evaluation JSONL.
        #[arg(long)]
        eval: PathBuf,
        /// Answers JSONL with one {"id", "text"} object per line.
        #[arg(long)]
        answers: PathBuf,
        /// Directory for report.json and accuracy.csv.
        #[arg(long)]
        out: PathBuf,
        /// Column name in the accuracy matrix.
        #[arg(long, default_value = "model")]
        model: String,
        #[arg(long, value_enum)]
        dfs_mode: Option<DfsArg>,
    },
    /// Build ontology graphs from a table directory, a document directory, or both.
    BuildOntology {
        /// Directory with <table>.csv files and schema.json.
        #[arg(long)]
        tables: Option<PathBuf>,
        /// Directory with .txt documents.
        #[arg(long)]
        docs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Align and fuse a tabular graph with a text graph.
    Fuse {
        #[arg(long)]
        structured: PathBuf,
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the alignment mapping.
        #[arg(long)]
        mapping_out: Option<PathBuf>,
    },
    /// Propose missing links; the graph itself is not modified.
    PredictLinks {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 20)]
        budget: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format(|buf, record| {
            writeln!(buf, "level={} target={} {}", record.level().as_str().to_lowercase(), record.target(), record.args())
        })
        .init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = config::RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    match &cli.command {
        Command::Dataset { stage1, stage2, with_features, .. } => {
            if let Some(n) = stage1 {
                cfg.dataset.stage1 = *n;
            }
            if let Some(n) = stage2 {
                cfg.dataset.stage2 = *n;
            }
            cfg.dataset.with_features |= *with_features;
        }
        Command::Grade { dfs_mode: Some(m), .. } => {
            cfg.grading.dfs_mode = match m {
                DfsArg::Canonical => DfsMode::Canonical,
                DfsArg::Validity => DfsMode::Validity,
            };
        }
        _ => {}
    }
    let cfg = cfg.resolve()?;
    log::info!("event=config resolved={}", serde_json::to_string(&cfg).expect("config serializes"));
    if let Some(n) = cfg.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("event=workers_ignored error=\"{e}\"");
        }
    }

    match cli.command {
        Command::Dataset { out, eval_only, .. } => commands::dataset(&cfg, &out, eval_only),
        Command::Grade { eval, answers, out, model, .. } => commands::grade(&cfg, &eval, &answers, &out, &model),
        Command::BuildOntology { tables, docs, out } => {
            commands::build_ontology(&cfg, tables.as_deref(), docs.as_deref(), &out)
        }
        Command::Fuse { structured, text, out, mapping_out } => {
            commands::fuse(&cfg, &structured, &text, &out, mapping_out.as_deref())
        }
        Command::PredictLinks { graph, budget, out } => commands::predict_links(&cfg, &graph, budget, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    init_logging();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("event=failed exit_code={} error=\"{e}\"", e.code());
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
