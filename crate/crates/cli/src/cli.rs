use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use searchenv_core::env::DEFAULT_MAX_ACTIONS;

use crate::commands;
use crate::provider::ProviderArgs;

#[derive(Debug, Parser)]
#[command(name = "searchenv", version, about = "Interactive web-search environment for long-form QA")]
pub struct Cli {
    #[command(flatten)]
    pub provider: ProviderArgs,
    /// Action budget for new sessions.
    #[arg(long, default_value_t = DEFAULT_MAX_ACTIONS, global = true)]
    pub max_actions: usize,
    /// Seed for every random choice (splits, corruption).
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serve the session and backend HTTP API.
    Serve(ServeArgs),
    /// Run one agent episode and write its trajectory.
    Run(RunArgs),
    /// Apply a list of actions to a fresh session and write the trajectory.
    Replay(ReplayArgs),
    /// Check trajectories by replaying them over their snapshots.
    Validate(FilesArgs),
    /// Dataset statistics as a JSON report.
    Stats(FilesArgs),
    /// Seeded train/dev/test partition of trajectory ids.
    Split(SplitArgs),
    /// Build corrupted synthesis records from trajectories.
    Corrupt(CorruptArgs),
    /// Score predictions against references.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Trajectory store for POST /record; records are kept in memory when absent.
    #[arg(long)]
    pub store: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub question: String,
    /// JSON array of script steps `{action, query?, fact?}`.
    #[arg(long, conflicts_with = "agent_url", required_unless_present = "agent_url")]
    pub script: Option<PathBuf>,
    /// Base URL of an agent serving POST /action, /query and /fact.
    #[arg(long)]
    pub agent_url: Option<String>,
    /// Append the trajectory here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub max_retries: usize,
    #[arg(long, default_value_t = searchenv_core::agent::DEFAULT_EDGE_CHARS)]
    pub edge_chars: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// JSON array of actions, e.g. `[{"kind":"search","query":"..."},{"kind":"load_page1"}]`.
    pub actions: PathBuf,
    #[arg(long)]
    pub question: String,
    #[arg(long)]
    pub answer: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilesArgs {
    /// Trajectory JSONL files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Trajectory JSONL; ids default to line numbers when unset.
    #[arg(required_unless_present = "count")]
    pub file: Option<PathBuf>,
    /// Split the synthetic ids 1..=N instead of a file.
    #[arg(long, conflicts_with = "file")]
    pub count: Option<u64>,
    /// Train, dev and test sizes.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [4700, 400, 400])]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    pub file: PathBuf,
    /// Injected facts per instance: a number or `auto`.
    #[arg(long, default_value = "auto")]
    pub noise: String,
    /// Sub-sentence erasure probability.
    #[arg(long, default_value_t = 0.0)]
    pub erase_p: f64,
    #[arg(long, default_value = searchenv_core::synthesis::DEFAULT_PUNCTUATION)]
    pub punctuation: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Action,
    Query,
    Fact,
    Synthesis,
    Novelty,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    pub gold: PathBuf,
    pub pred: PathBuf,
    /// Novelty normalised by the facts' n-gram count instead of the candidate's.
    #[arg(long)]
    pub fact_normalized: bool,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
