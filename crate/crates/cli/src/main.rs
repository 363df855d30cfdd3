//! `knowtraj`: build bi-layer author/topic networks, recommend topics by
//! diffusion, and evaluate against baseline link predictors.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{read_config_file, RunConfig};

#[derive(Parser)]
#[command(name = "knowtraj", version, about = "Topic recommendation on bi-layer author/topic networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Parse records and report counts and the time split.
    Ingest,
    /// Build the network and write its edge lists and statistics.
    Build,
    /// Recommend topics for every author.
    Recommend,
    /// ROC/AUC of each method on the time-split candidate set.
    Evaluate,
    /// AUC of each method on a sampled probe set.
    Probe,
    /// Aggregate recommendations by community.
    Aggregate,
    /// Run the built-in consistency checks.
    Selfcheck,
}

#[derive(Args)]
struct Flags {
    /// key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Record file (JSON lines) or edge list (CSV).
    #[arg(long, global = true)]
    input: Option<String>,
    /// jsonl | csv
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    cutoff_year: Option<String>,
    /// Comma-separated: diffusion, jc, aa, pa, ra, wra, content, cf, semantic, or all.
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    top_n: Option<String>,
    /// Comma-separated top-k groups for ROC.
    #[arg(long, global = true)]
    top_k: Option<String>,
    #[arg(long, global = true)]
    probe_size: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads; defaults to $KNOWTRAJ_WORKERS, then the CPU count.
    #[arg(long, global = true)]
    workers: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Topic vectors (label<TAB>v1 v2 …) enabling the semantic method.
    #[arg(long, global = true)]
    vectors: Option<String>,
    #[arg(long, global = true)]
    similarity_floor: Option<String>,
    /// TSV of author identity and community id.
    #[arg(long, global = true)]
    author_labels: Option<String>,
    /// TSV of topic label and community id.
    #[arg(long, global = true)]
    topic_labels: Option<String>,
    /// Recommendation JSON lines to aggregate.
    #[arg(long, global = true)]
    recommendations: Option<String>,
}

impl Flags {
    fn to_map(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("input", &self.input),
            ("format", &self.format),
            ("cutoff_year", &self.cutoff_year),
            ("method", &self.method),
            ("top_n", &self.top_n),
            ("top_k", &self.top_k),
            ("probe_size", &self.probe_size),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("out", &self.out),
            ("vectors", &self.vectors),
            ("similarity_floor", &self.similarity_floor),
            ("author_labels", &self.author_labels),
            ("topic_labels", &self.topic_labels),
            ("recommendations", &self.recommendations),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_owned(), v)))
            .collect()
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Command::Selfcheck = cli.command {
        return Ok(commands::selfcheck());
    }
    let file = match &cli.flags.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::resolve(file, cli.flags.to_map())?;
    commands::check_methods(&cfg)?;
    match cli.command {
        Command::Ingest => commands::ingest(&cfg)?,
        Command::Build => commands::build(&cfg)?,
        Command::Recommend => commands::recommend(&cfg)?,
        Command::Evaluate => commands::evaluate(&cfg)?,
        Command::Probe => commands::probe(&cfg)?,
        Command::Aggregate => commands::aggregate(&cfg)?,
        Command::Selfcheck => unreachable!(),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("knowtraj: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("knowtraj: error: {msg}");
            ExitCode::from(2)
        }
    }
}
