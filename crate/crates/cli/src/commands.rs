use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use searchenv_core::agent::{run_episode, HttpAgent, RunnerConfig, ScriptStep, ScriptedAgent};
use searchenv_core::backend::SearchProvider;
use searchenv_core::eval::{micro_macro_f1, novelty, rouge_l, MetricError, MetricReport, NoveltyVariant};
use searchenv_core::synthesis::{corrupt_dataset, CorruptionConfig, NoiseCount, SynthesisInstance};
use searchenv_core::trajectory::{
    compute_stats, read_jsonl, split_dataset, to_jsonl_line, validate_all, DatasetStats, Trajectory,
};
use searchenv_core::{Action, ActionKind, Session, WIRE_VERSION};
use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::cli::{Cli, Command, CorruptArgs, EvalArgs, FilesArgs, ReplayArgs, RunArgs, SplitArgs, Task};

pub fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Serve(args) => {
            let provider = cli.provider.build()?;
            crate::server::serve_blocking(args, provider, cli.max_actions)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => run(&cli.provider.build()?, cli.max_actions, args),
        Command::Replay(args) => replay(&cli.provider.build()?, cli.max_actions, args),
        Command::Validate(args) => validate(args),
        Command::Stats(args) => stats(args),
        Command::Split(args) => split(args, cli.seed),
        Command::Corrupt(args) => corrupt(args, cli.seed),
        Command::Eval(args) => eval(args),
    }
}

fn emit_lines(out: Option<&Path>, lines: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            for l in lines {
                f.write_all(l.as_bytes())?;
            }
            f.sync_data()?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for l in lines {
                stdout.write_all(l.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn load_trajectories(files: &[PathBuf]) -> Result<Vec<Trajectory>> {
    let mut all = Vec::new();
    for f in files {
        all.extend(read_jsonl::<Trajectory>(f)?);
    }
    Ok(all)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(provider: &Arc<dyn SearchProvider>, max_actions: usize, args: RunArgs) -> Result<ExitCode> {
    let mut session = Session::new(&args.question, max_actions, provider.clone())?;
    let config = RunnerConfig { max_retries: args.max_retries, edge_chars: args.edge_chars, ..RunnerConfig::default() };
    let trajectory = match (&args.script, &args.agent_url) {
        (Some(path), _) => {
            let steps: Vec<ScriptStep> = read_json(path)?;
            run_episode(&mut ScriptedAgent::new(steps), &mut session, &config)
        }
        (None, Some(url)) => run_episode(&mut HttpAgent::new(url)?, &mut session, &config),
        (None, None) => bail!("either --script or --agent-url is required"),
    };
    emit_lines(args.out.as_deref(), &[to_jsonl_line(&trajectory)])?;
    match &trajectory.status {
        searchenv_core::trajectory::EpisodeStatus::Completed => Ok(ExitCode::SUCCESS),
        searchenv_core::trajectory::EpisodeStatus::Failed { reason } => {
            eprintln!("episode failed: {reason}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn replay(provider: &Arc<dyn SearchProvider>, max_actions: usize, args: ReplayArgs) -> Result<ExitCode> {
    let actions: Vec<Action> = read_json(&args.actions)?;
    let mut session = Session::new(&args.question, max_actions, provider.clone())?;
    for (i, a) in actions.into_iter().enumerate() {
        let shown = a.to_string();
        session.apply(a).with_context(|| format!("action {} ({shown})", i + 1))?;
    }
    let t = session.trajectory(args.answer, None);
    emit_lines(args.out.as_deref(), &[to_jsonl_line(&t)])?;
    Ok(ExitCode::SUCCESS)
}

fn validate(args: FilesArgs) -> Result<ExitCode> {
    let mut bad = 0;
    for file in &args.files {
        let trajectories: Vec<Trajectory> = read_jsonl(file)?;
        let results = validate_all(&trajectories, Default::default());
        for (line, violations) in results.iter().enumerate() {
            if violations.is_empty() {
                println!("{}:{}: ok", file.display(), line + 1);
            } else {
                bad += 1;
                let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
                println!("{}:{}: {}", file.display(), line + 1, text.join("; "));
            }
        }
    }
    Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[derive(Serialize)]
struct StatsReport {
    v: &'static str,
    /// Mean actions/queries/page loads/facts.
    summary: String,
    #[serde(flatten)]
    stats: DatasetStats,
}

fn stats(args: FilesArgs) -> Result<ExitCode> {
    let data = load_trajectories(&args.files)?;
    let stats = compute_stats(&data)?;
    let report = StatsReport { v: WIRE_VERSION, summary: stats.headline(), stats };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SplitReport {
    v: &'static str,
    seed: u64,
    train: Vec<u64>,
    dev: Vec<u64>,
    test: Vec<u64>,
}

fn split(args: SplitArgs, seed: u64) -> Result<ExitCode> {
    let ids: Vec<u64> = match (&args.file, args.count) {
        (_, Some(n)) => (1..=n).collect(),
        (Some(f), None) => {
            read_jsonl::<Trajectory>(f)?.iter().enumerate().map(|(i, t)| t.id.unwrap_or(i as u64 + 1)).collect()
        }
        (None, None) => bail!("a trajectory file or --count is required"),
    };
    let [train, dev, test] = args.sizes[..] else {
        bail!("--sizes takes exactly three numbers");
    };
    let s = split_dataset(&ids, (train, dev, test), seed)?;
    let report = SplitReport { v: WIRE_VERSION, seed, train: s.train, dev: s.dev, test: s.test };
    println!("{}", serde_json::to_string(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn corrupt(args: CorruptArgs, seed: u64) -> Result<ExitCode> {
    let noise = match args.noise.as_str() {
        "auto" => NoiseCount::Auto,
        n => NoiseCount::Fixed(n.parse().map_err(|_| anyhow!("--noise must be a number or `auto`, got {n:?}"))?),
    };
    let data: Vec<Trajectory> = read_jsonl(&args.file)?;
    let instances: Vec<SynthesisInstance> = data
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let inst = SynthesisInstance::from_trajectory(t);
            if inst.is_none() {
                warn!(line = i + 1, "skipping trajectory without an answer");
            }
            inst
        })
        .collect();
    let config = CorruptionConfig { noise, erase_p: args.erase_p, punctuation: args.punctuation, seed };
    let records = corrupt_dataset(&instances, &config, Default::default())?;
    let lines: Vec<String> = records.iter().map(to_jsonl_line).collect();
    emit_lines(args.out.as_deref(), &lines)?;
    Ok(ExitCode::SUCCESS)
}

/// One line of an eval file: a bare JSON string or `{"text", "facts"?}`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EvalLine {
    Text(String),
    Record {
        text: String,
        #[serde(default)]
        facts: Vec<String>,
    },
}

impl EvalLine {
    fn text(&self) -> &str {
        match self {
            EvalLine::Text(t) | EvalLine::Record { text: t, .. } => t,
        }
    }

    fn facts(&self) -> &[String] {
        match self {
            EvalLine::Text(_) => &[],
            EvalLine::Record { facts, .. } => facts,
        }
    }
}

fn parse_actions(lines: &[EvalLine], path: &Path) -> Result<Vec<ActionKind>> {
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            ActionKind::from_name(l.text())
                .ok_or_else(|| anyhow!("{}:{}: unknown action {:?}", path.display(), i + 1, l.text()))
        })
        .collect()
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn eval(args: EvalArgs) -> Result<ExitCode> {
    let gold: Vec<EvalLine> = read_jsonl(&args.gold)?;
    let pred: Vec<EvalLine> = read_jsonl(&args.pred)?;
    if gold.len() != pred.len() {
        bail!("{} reference lines vs {} predictions", gold.len(), pred.len());
    }
    let task = match args.task {
        Task::Action => "action",
        Task::Query => "query",
        Task::Fact => "fact",
        Task::Synthesis => "synthesis",
        Task::Novelty => "novelty",
    };
    let mut report = MetricReport::new(task, gold.len());
    match args.task {
        Task::Action => {
            let f = micro_macro_f1(&parse_actions(&gold, &args.gold)?, &parse_actions(&pred, &args.pred)?)?;
            report.micro_f1 = Some(f.micro);
            report.macro_f1 = Some(f.macro_);
        }
        Task::Query | Task::Fact | Task::Synthesis => {
            let scores: Vec<f64> = gold.iter().zip(&pred).map(|(g, p)| rouge_l(p.text(), g.text())).collect();
            report.rouge_l = mean(&scores);
        }
        Task::Novelty => {}
    }
    if matches!(args.task, Task::Synthesis | Task::Novelty) {
        let variant =
            if args.fact_normalized { NoveltyVariant::FactNormalized } else { NoveltyVariant::CandidateShare };
        let mut scores = Vec::new();
        for (g, p) in gold.iter().zip(&pred) {
            let facts = if p.facts().is_empty() { g.facts() } else { p.facts() };
            match novelty(p.text(), facts, variant) {
                Ok(n) => scores.push(n),
                Err(MetricError::Undefined(_)) => report.skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
        report.novelty = mean(&scores);
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}
