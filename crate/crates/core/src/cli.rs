//! Configuration and command implementations behind the `evo2048` binary.
//!
//! Settings come from defaults, then an optional TOML file (`--config`), then
//! flags, later sources winning. Progress goes to stderr and results to stdout.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::agents::{
    AgentClient, AgentEndpoint, EchoThinker, FirstLegalExecutor, HttpTransport, LlmExecutor, LlmThinker, MockTransport,
    MoveAgent, PreferenceExecutor, PromptRole, Provider, StrategyAgent, Transport,
};
use crate::engine::{read_jsonl, replay};
use crate::evolution::{
    game_seed, run_baseline, run_cycle, run_evolution, run_metaprompt, CycleEvaluator, CycleReport, DeterministicMutator,
    EvolutionConfig, EvolutionError, LlmMutator, MetapromptConfig, Mutator, MutatorKind, RunDir, RunOptions,
};
use crate::heuristics::{canonical_post10, canonical_pre10, serve, ValueFunctionSpec};
use crate::metrics::{build_report, cycle_stats, distribution, emit_report, DistributionKind, DistributionTable, RunReport};
use crate::search::SearchConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Evolve,
    Metaprompt,
    Baseline,
    Replay,
    Report,
    Eval,
    /// Serve a spec over the external evaluator protocol on stdin/stdout.
    EvalServer,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Evolve => "evolve",
            Mode::Metaprompt => "metaprompt",
            Mode::Baseline => "baseline",
            Mode::Replay => "replay",
            Mode::Report => "report",
            Mode::Eval => "eval",
            Mode::EvalServer => "eval-server",
        }
    }
}

#[derive(Debug, Clone, Parser, Default)]
#[command(name = "evo2048", version, about = "Monte Carlo 2048 play with evolving value functions")]
pub struct Cli {
    /// Command to run; may also be given as the first argument.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Spec file (eval, eval-server), game file (replay) or run directory (report).
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub cycles: Option<u32>,
    /// Games per cycle, per metaprompt round, or in total for eval and baseline.
    #[arg(long)]
    pub games: Option<u32>,
    #[arg(long)]
    pub segment: Option<u32>,
    #[arg(long)]
    pub mutator: Option<String>,
    #[arg(long)]
    pub playouts: Option<u32>,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub run_dir: Option<PathBuf>,
    /// Use scripted offline agents instead of a provider.
    #[arg(long)]
    pub mock: bool,
    #[arg(long)]
    pub provider: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Metaprompt rounds.
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Stop an evolve run after this cycle; rerun to resume.
    #[arg(long)]
    pub stop_after: Option<u32>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

/// Everything a command needs, as resolved from defaults, file and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub run_dir: Option<PathBuf>,
    pub evolution: EvolutionConfig,
    pub search: SearchConfig,
    pub metaprompt: MetapromptConfig,
    pub agent: Option<AgentEndpoint>,
    pub mock: bool,
    pub initial_strategy: String,
    /// Games for eval and baseline.
    pub games: u32,
    /// Master seed for every mode; overrides the per-section seeds when set.
    pub seed: Option<u64>,
    pub log_level: String,
    #[serde(skip)]
    pub target: Option<PathBuf>,
    #[serde(skip)]
    pub stop_after: Option<u32>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: None,
            run_dir: None,
            evolution: EvolutionConfig::default(),
            search: SearchConfig::default(),
            metaprompt: MetapromptConfig::default(),
            agent: None,
            mock: false,
            initial_strategy: "Keep the largest tile in a bottom corner and build a descending row beside it. \
                               Avoid moving up unless nothing else is possible."
                .to_string(),
            games: 10,
            seed: None,
            log_level: "warn".to_string(),
            target: None,
            stop_after: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<EvolutionError> for CliError {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::InvalidConfig(_) | EvolutionError::Spec(_) | EvolutionError::ConfigMismatch(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

const MODE_WORDS: [&str; 7] = ["evolve", "metaprompt", "baseline", "replay", "report", "eval", "eval-server"];

/// Turns a leading bare mode word (`evo2048 evolve ...`) into `--mode evolve`.
pub fn normalize_args<I, S>(args: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut v: Vec<String> = args.into_iter().map(Into::into).collect();
    if v.len() > 1 && MODE_WORDS.contains(&v[1].as_str()) {
        let mode = v.remove(1);
        v.insert(1, mode);
        v.insert(1, "--mode".to_string());
    }
    v
}

impl RunConfig {
    /// Applies the config file named by `cli.config` and then the flags.
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let mut cfg = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                toml::from_str::<RunConfig>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(m) = cli.mode {
            cfg.mode = Some(m);
        }
        if let Some(n) = cli.cycles {
            cfg.evolution.cycles = n;
        }
        if let Some(n) = cli.games {
            cfg.evolution.games_per_cycle = n;
            cfg.metaprompt.games_per_round = n;
            cfg.games = n;
        }
        if let Some(n) = cli.segment {
            cfg.evolution.segment_length = n;
        }
        if let Some(m) = &cli.mutator {
            cfg.evolution.mutator = m.parse().map_err(|e: EvolutionError| CliError::Config(e.to_string()))?;
        }
        if let Some(n) = cli.playouts {
            cfg.search.playouts_per_move = n;
        }
        if let Some(n) = cli.depth {
            cfg.search.playout_depth = n;
        }
        if let Some(l) = cli.lambda {
            cfg.search.leaf_mix = l;
        }
        if cli.seed.is_some() {
            cfg.seed = cli.seed;
        }
        if let Some(s) = cfg.seed {
            cfg.evolution.master_seed = s;
            cfg.metaprompt.master_seed = s;
        }
        if let Some(d) = &cli.run_dir {
            cfg.run_dir = Some(d.clone());
        }
        if cli.mock {
            cfg.mock = true;
        }
        if let Some(n) = cli.rounds {
            cfg.metaprompt.rounds = n;
        }
        if cli.provider.is_some() || cli.model.is_some() {
            let provider = match &cli.provider {
                Some(p) => p.parse::<Provider>().map_err(|e| CliError::Config(e.to_string()))?,
                None => cfg.agent.as_ref().map_or(Provider::OpenAi, |a| a.provider),
            };
            let mut endpoint = match cfg.agent.take() {
                Some(a) if a.provider == provider => a,
                _ => AgentEndpoint::for_provider(provider, AgentEndpoint::default().model),
            };
            if let Some(m) = &cli.model {
                endpoint.model = m.clone();
            }
            cfg.agent = Some(endpoint);
        }
        match cli.verbose {
            0 => {}
            1 => cfg.log_level = "info".into(),
            _ => cfg.log_level = "debug".into(),
        }
        cfg.target = cli.target.clone();
        cfg.stop_after = cli.stop_after;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let mode = self.mode.ok_or_else(|| CliError::Config("no mode given".into()))?;
        let cfg_err = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
        match mode {
            Mode::Evolve => {
                self.evolution.validate().map_err(|e| cfg_err(&e))?;
                self.search.validate().map_err(|e| cfg_err(&e))?;
                if self.evolution.mutator == MutatorKind::ExternalLlm && !self.mock && self.agent.is_none() {
                    return Err(CliError::Config("the external_llm mutator needs --provider/--model or --mock".into()));
                }
            }
            Mode::Metaprompt | Mode::Baseline => {
                self.metaprompt.validate().map_err(|e| cfg_err(&e))?;
                if !self.mock && self.agent.is_none() {
                    return Err(CliError::Config(format!("{} needs --provider/--model or --mock", mode.name())));
                }
            }
            Mode::Eval => {
                self.search.validate().map_err(|e| cfg_err(&e))?;
                if self.games == 0 {
                    return Err(CliError::Config("--games must be at least 1".into()));
                }
                self.target_path()?;
            }
            Mode::Replay | Mode::Report | Mode::EvalServer => {
                self.target_path()?;
            }
        }
        if let Some(a) = &self.agent {
            a.validate().map_err(|e| cfg_err(&e))?;
        }
        Ok(())
    }

    fn target_path(&self) -> Result<&Path, CliError> {
        self.target
            .as_deref()
            .or(if self.mode == Some(Mode::Report) { self.run_dir.as_deref() } else { None })
            .ok_or_else(|| CliError::Config(format!("{} needs a target path", self.mode.map_or("", Mode::name))))
    }

    /// Seed for eval and baseline games.
    pub fn master_seed(&self) -> u64 {
        self.seed.unwrap_or(self.evolution.master_seed)
    }

    fn run_dir(&self) -> PathBuf {
        self.run_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("runs/{}-seed{}", self.mode.map_or("run", Mode::name), self.master_seed())))
    }

    fn endpoint(&self) -> AgentEndpoint {
        self.agent.clone().unwrap_or_default()
    }
}

fn init_logging(level: &str) {
    let _ = env_logger::Builder::new()
        .parse_filters(&std::env::var("RUST_LOG").unwrap_or_else(|_| level.to_string()))
        .target(env_logger::Target::Stderr)
        .try_init();
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Runs the command selected by `cli`.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli)?;
    init_logging(&cfg.log_level);
    let mut out = std::io::stdout().lock();
    match cfg.mode.expect("validated") {
        Mode::Evolve => cmd_evolve(&cfg, &mut out),
        Mode::Metaprompt => cmd_metaprompt(&cfg, &mut out),
        Mode::Baseline => cmd_baseline(&cfg, &mut out),
        Mode::Replay => cmd_replay(cfg.target_path()?, &mut out),
        Mode::Report => cmd_report(cfg.target_path()?, &mut out),
        Mode::Eval => cmd_eval(&cfg, &mut out),
        Mode::EvalServer => cmd_eval_server(cfg.target_path()?),
    }
}

fn progress_line(r: &CycleReport, total: u32) {
    match &r.failure {
        Some(reason) => eprintln!("cycle {}/{} {} FAILED: {reason}", r.cycle_index, total, r.spec_id),
        None => eprintln!(
            "cycle {}/{} {} mean {:.1} ci95 {:.1} best tile {}",
            r.cycle_index,
            total,
            r.spec_id,
            r.mean_score,
            r.ci95_half_width,
            r.best_tile()
        ),
    }
}

/// Offline stand-in for a value-function model: echoes the current spec back
/// as a weight listing, which exercises the whole prompt and parse path.
fn echo_spec_transport() -> MockTransport {
    MockTransport::new(|bundle| {
        let spec = bundle
            .attachments
            .get("spec")
            .and_then(|s| ValueFunctionSpec::from_json(s).ok())
            .ok_or_else(|| crate::agents::AgentError::Protocol("no spec attached".into()))?;
        let mut listing = String::from("```\n");
        for t in &spec.terms {
            let _ = writeln!(listing, "{} {}", t.term.kind, t.weight);
        }
        listing.push_str("```\n");
        Ok(listing)
    })
}

fn transport(cfg: &RunConfig) -> Arc<dyn Transport> {
    if cfg.mock {
        Arc::new(echo_spec_transport())
    } else {
        Arc::new(HttpTransport)
    }
}

pub fn cmd_evolve(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let dir = RunDir::new(cfg.run_dir());
    let deterministic = DeterministicMutator {
        sigma: cfg.evolution.mutation_sigma,
        toggle_prob: cfg.evolution.toggle_prob,
    };
    let mutator: Box<dyn Mutator> = match cfg.evolution.mutator {
        MutatorKind::Deterministic => Box::new(deterministic),
        MutatorKind::ExternalLlm => {
            let client = AgentClient::new(cfg.endpoint(), transport(cfg)).map_err(|e| CliError::Config(e.to_string()))?;
            Box::new(LlmMutator::new(client, deterministic))
        }
    };
    let total = cfg.evolution.cycles;
    let progress = move |r: &CycleReport| progress_line(r, total);
    let opts = RunOptions {
        stop_after: cfg.stop_after,
        agent: (cfg.evolution.mutator == MutatorKind::ExternalLlm && !cfg.mock).then(|| cfg.endpoint()),
        progress: Some(&progress),
    };
    let outcome = run_evolution(&cfg.evolution, &cfg.search, &dir, mutator.as_ref(), &opts)?;
    let summary = serde_json::json!({
        "run_dir": dir.root().display().to_string(),
        "cycles": outcome.reports.len(),
        "completed": outcome.completed,
        "rollbacks": outcome.lineage.rollbacks.len(),
        "final_spec": outcome.final_spec_id,
        "last_mean": outcome.reports.last().map(|r| r.mean_score),
    });
    writeln!(out, "{summary}").map_err(runtime)
}

fn agents(cfg: &RunConfig, role: PromptRole) -> Result<(Box<dyn MoveAgent>, Box<dyn StrategyAgent>), CliError> {
    if cfg.mock {
        let executor: Box<dyn MoveAgent> = match role {
            PromptRole::BaselineMove => Box::new(FirstLegalExecutor),
            _ => Box::new(PreferenceExecutor),
        };
        return Ok((executor, Box::new(EchoThinker)));
    }
    let client = AgentClient::new(cfg.endpoint(), Arc::new(HttpTransport)).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((
        Box::new(LlmExecutor {
            client: client.clone(),
            role,
            strategy_cap: cfg.metaprompt.strategy_cap,
        }),
        Box::new(LlmThinker {
            client,
            strategy_cap: cfg.metaprompt.strategy_cap,
        }),
    ))
}

pub fn cmd_metaprompt(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let dir = RunDir::new(cfg.run_dir());
    let (executor, thinker) = agents(cfg, PromptRole::ExecutorMove)?;
    let total = cfg.metaprompt.rounds;
    let progress = move |r: &CycleReport| progress_line(r, total);
    let reports = run_metaprompt(
        &cfg.metaprompt,
        &cfg.initial_strategy,
        executor.as_ref(),
        thinker.as_ref(),
        &dir,
        (!cfg.mock).then(|| cfg.endpoint()),
        Some(&progress),
    )?;
    let summary = serde_json::json!({
        "run_dir": dir.root().display().to_string(),
        "rounds": reports.len(),
        "means": reports.iter().map(|r| r.mean_score).collect::<Vec<_>>(),
    });
    writeln!(out, "{summary}").map_err(runtime)
}

pub fn cmd_baseline(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let dir = RunDir::new(cfg.run_dir());
    let (executor, _) = agents(cfg, PromptRole::BaselineMove)?;
    let report = run_baseline(
        cfg.games,
        cfg.master_seed(),
        executor.as_ref(),
        cfg.metaprompt.concurrency,
        &dir,
        (!cfg.mock).then(|| cfg.endpoint()),
    )?;
    progress_line(&report, 1);
    let summary = serde_json::json!({
        "run_dir": dir.root().display().to_string(),
        "games": report.scores.len(),
        "mean": report.mean_score,
        "ci95_half_width": report.ci95_half_width,
    });
    writeln!(out, "{summary}").map_err(runtime)
}

/// Re-simulates every record in a JSONL file, printing each board.
pub fn cmd_replay(path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let f = fs::File::open(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let records =
        read_jsonl(BufReader::new(f)).map_err(|e| CliError::Verification(format!("{}: {e}", path.display())))?;
    if records.is_empty() {
        return Err(CliError::Verification(format!("{}: no game records", path.display())));
    }
    for (n, rec) in records.iter().enumerate() {
        let boards = replay(rec).map_err(|d| CliError::Verification(format!("record {}: {d}", n + 1)))?;
        writeln!(out, "record {} seed {}", n + 1, rec.seed).map_err(runtime)?;
        for (i, b) in boards.iter().enumerate() {
            let label = if i == 0 { "initial".to_string() } else { rec.steps[i - 1].dir.to_string() };
            writeln!(out, "step {i} {label}\n{b}").map_err(runtime)?;
        }
        writeln!(
            out,
            "verified: {} moves, score {}, highest tile {}",
            rec.steps.len(),
            rec.final_score,
            rec.highest_tile
        )
        .map_err(runtime)?;
    }
    Ok(())
}

fn write_table(out: &mut dyn Write, title: &str, t: &DistributionTable) -> std::io::Result<()> {
    writeln!(out, "{title} ({} games)", t.total_games)?;
    for b in &t.buckets {
        writeln!(out, "  {:>8}  {:>5}  {:>5.1}%", b.label, b.count, b.percentage)?;
    }
    Ok(())
}

fn print_report(out: &mut dyn Write, r: &RunReport) -> std::io::Result<()> {
    writeln!(out, "cycles: {}{}", r.cycles.len(), if r.partial { " (partial)" } else { "" })?;
    for c in &r.cycles {
        writeln!(
            out,
            "  cycle {:>3}  {:<14} mean {:>9.1}  ci95 [{:.1}, {:.1}]{}",
            c.cycle_index,
            c.spec_id,
            c.mean_score,
            c.ci_low,
            c.ci_high,
            if c.failed { "  FAILED" } else { "" }
        )?;
    }
    match &r.trend {
        Some(t) => writeln!(
            out,
            "trend: slope {:.3} points/cycle, intercept {:.3}, rho (pearson) {:.4}, spearman {:.4}{}",
            t.slope,
            t.intercept,
            t.pearson_r,
            t.spearman_rho,
            if t.degenerate { " (degenerate)" } else { "" }
        )?,
        None => writeln!(out, "trend: needs at least 2 cycles")?,
    }
    write_table(out, "highest tile", &r.highest_tile)?;
    write_table(out, "score range", &r.score_range)
}

pub fn cmd_report(path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let dir = RunDir::new(path);
    let report = emit_report(&dir).map_err(runtime)?;
    print_report(out, &report).map_err(runtime)
}

/// Reads a spec file, or one of the built-in names `pre10` / `post10`.
pub fn load_spec(path: &Path) -> Result<ValueFunctionSpec, CliError> {
    match path.to_str() {
        Some("pre10") => return Ok(canonical_pre10()),
        Some("post10") => return Ok(canonical_post10()),
        _ => {}
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    ValueFunctionSpec::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn cmd_eval(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(cfg.target_path()?)?;
    if spec.program.is_some() {
        return Err(CliError::Config("eval runs declarative specs only".into()));
    }
    let seeds: Vec<u64> = (0..cfg.games).map(|g| game_seed(cfg.master_seed(), 1, g)).collect();
    let outcome = run_cycle(&CycleEvaluator::Declarative(&spec), &spec.id, 1, &cfg.search, &seeds);
    if let Some(reason) = &outcome.report.failure {
        return Err(CliError::Runtime(reason.clone()));
    }
    let scores: Vec<f64> = outcome.records.iter().map(|r| r.final_score as f64).collect();
    let stats = cycle_stats(&scores).map_err(runtime)?;
    let tiles = distribution(&outcome.records, DistributionKind::HighestTile).map_err(runtime)?;
    let mut text = String::new();
    let _ = writeln!(text, "spec {}: {} games, seed {}", spec.id, seeds.len(), cfg.master_seed());
    let _ = writeln!(
        text,
        "mean {:.1}  ci95 ±{:.1}  [{:.1}, {:.1}]",
        stats.mean,
        stats.ci95_half_width,
        stats.low(),
        stats.high()
    );
    out.write_all(text.as_bytes()).map_err(runtime)?;
    write_table(out, "highest tile", &tiles).map_err(runtime)
}

pub fn cmd_eval_server(path: &Path) -> Result<(), CliError> {
    let spec = load_spec(path)?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    serve(&spec, stdin.lock(), stdout.lock()).map_err(runtime)
}

/// Report for an existing run without writing files.
pub fn summarize(path: &Path) -> Result<RunReport, CliError> {
    build_report(&RunDir::new(path)).map_err(runtime)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(normalize_args(args.iter().copied())).unwrap()
    }

    #[test]
    fn bare_mode_word() {
        let cli = parse(&["evo2048", "evolve", "--cycles", "2"]);
        assert_eq!(cli.mode, Some(Mode::Evolve));
        assert_eq!(cli.cycles, Some(2));
        let cli = parse(&["evo2048", "replay", "game.jsonl"]);
        assert_eq!(cli.mode, Some(Mode::Replay));
        assert_eq!(cli.target, Some(PathBuf::from("game.jsonl")));
    }

    #[test]
    fn flags_override_file() {
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("run.toml");
        fs::write(
            &file,
            "mode = \"evolve\"\nseed = 3\n[evolution]\ncycles = 7\ngames_per_cycle = 4\n[search]\nplayouts_per_move = 9\n",
        )
        .unwrap();
        let cli = parse(&["evo2048", "--config", file.to_str().unwrap(), "--playouts", "12"]);
        let cfg = RunConfig::resolve(&cli).unwrap();
        assert_eq!(cfg.mode, Some(Mode::Evolve));
        assert_eq!(cfg.evolution.cycles, 7);
        assert_eq!(cfg.evolution.games_per_cycle, 4);
        assert_eq!(cfg.search.playouts_per_move, 12);
        assert_eq!(cfg.search.playout_depth, 10);
        assert_eq!(cfg.evolution.master_seed, 3);
    }

    #[test]
    fn config_errors() {
        for args in [
            vec!["evo2048", "evolve", "--cycles", "0"],
            vec!["evo2048", "metaprompt"],
            vec!["evo2048", "evolve", "--lambda", "1.5"],
            vec!["evo2048", "eval"],
            vec!["evo2048", "evolve", "--mutator", "magic"],
        ] {
            let err = RunConfig::resolve(&parse(&args)).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{args:?}: {err}");
        }
    }

    #[test]
    fn provider_flags_build_an_endpoint() {
        let cfg = RunConfig::resolve(&parse(&["evo2048", "metaprompt", "--provider", "anthropic", "--model", "m1"])).unwrap();
        let a = cfg.agent.unwrap();
        assert_eq!(a.provider, Provider::Anthropic);
        assert_eq!(a.model, "m1");
        assert_eq!(a.credential_env, "ANTHROPIC_API_KEY");
    }
}
