//! `relreward`: synthesize, check, replay and train on reward programs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relreward_core::games::Game;
use relreward_core::synthesis::Mode;

#[derive(Parser, Debug)]
#[command(name = "relreward", version, about = "Object-centric reward programs: synthesis, validation, replay and PPO training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ask a language model for a reward program, or replay a stored transcript.
    Synthesize(SynthesizeArgs),
    /// Parse, type check, bound and fuzz a reward program.
    Validate(ValidateArgs),
    /// Evaluate a program on every step of a recorded trace (CSV output).
    Replay(ReplayArgs),
    /// Train PPO policies on a mini environment with a reward program.
    Train(TrainArgs),
    /// Summarize the metrics of a run directory.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    /// Game: freeway, pong, seaquest or skiing.
    #[arg(long)]
    game: Game,
    /// Prompting protocol: full or no_relations.
    #[arg(long)]
    mode: Mode,
    /// Replay this stored transcript instead of calling the model.
    #[arg(long, value_name = "TRANSCRIPT")]
    offline: Option<PathBuf>,
    /// Model name sent to the chat endpoint.
    #[arg(long, default_value = relreward_core::synthesis::DEFAULT_MODEL)]
    model: String,
    /// Sampling seed sent with every request.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Chat completions URL (overrides REWARD_SYNTH_ENDPOINT).
    #[arg(long)]
    endpoint: Option<String>,
    /// Minimum pause between live requests, in milliseconds.
    #[arg(long, default_value_t = 1000)]
    min_interval_ms: u64,
    /// Parent directory for run directories.
    #[arg(long, default_value = "runs")]
    runs_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Reward program source file.
    program: PathBuf,
    /// Random snapshots to evaluate (0 skips fuzzing).
    #[arg(long, default_value_t = 10_000)]
    fuzz: usize,
    /// Games to draw fuzz snapshots from (repeatable; default all).
    #[arg(long)]
    game: Vec<Game>,
    /// Seed of the fuzz snapshot generator.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    /// Trace file (JSONL: config header, then one record per step).
    #[arg(long)]
    trace: PathBuf,
    /// Reward program source file.
    #[arg(long)]
    program: PathBuf,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Simulated game: freeway or pong.
    #[arg(long)]
    game: Game,
    /// Reward program source file.
    #[arg(long)]
    program: PathBuf,
    /// Training config (JSON, TrainingConfig field names; missing fields take defaults).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed to train (repeatable). Defaults to 42.
    #[arg(long)]
    seed: Vec<u64>,
    /// Train every seed listed in the config instead.
    #[arg(long, conflicts_with = "seed")]
    config_seeds: bool,
    /// Episode length override.
    #[arg(long)]
    horizon: Option<usize>,
    /// Label for the run directory; detected from the fixtures when omitted.
    #[arg(long)]
    mode: Option<String>,
    /// Parent directory for run directories.
    #[arg(long, default_value = "runs")]
    runs_dir: PathBuf,
    /// No progress output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Run directory containing metrics.csv.
    run_dir: PathBuf,
    /// Smoothing window for curves and bands.
    #[arg(long, default_value_t = relreward_core::analysis::DEFAULT_WINDOW)]
    window: usize,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Synthesize(a) => commands::synthesize(a, &argv),
        Command::Validate(a) => commands::validate(a),
        Command::Replay(a) => commands::replay(a),
        Command::Train(a) => commands::train(a, &argv),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::Failure::User(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(commands::Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}
