use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::anyhow;
use relreward_core::analysis::{self, MetricRow, SYNTH_RETURN, TRUE_SCORE};
use relreward_core::dsl::fuzz::fuzz_program;
use relreward_core::dsl::{compile, lint, static_bounds, Interval, RewardProgram};
use relreward_core::env::{replay_evaluations, EnvConfig, EpisodeTrace};
use relreward_core::fixtures;
use relreward_core::games::Game;
use relreward_core::run::{create_run_dir, RunManifest};
use relreward_core::synthesis::{
    run_pipeline, ChatClient, LiveClient, OfflinePlayer, SynthesisRequest, Transcript,
};
use relreward_core::trainer::{checkpoint, train_with_progress, TrainingConfig};

use crate::{ReplayArgs, ReportArgs, SynthesizeArgs, TrainArgs, ValidateArgs};

/// User errors exit with 1, everything else with 2.
pub enum Failure {
    User(anyhow::Error),
    Internal(anyhow::Error),
}

type Res = Result<(), Failure>;

trait Classify<T> {
    fn user(self, ctx: impl std::fmt::Display) -> Result<T, Failure>;
    fn internal(self, ctx: impl std::fmt::Display) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn user(self, ctx: impl std::fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::User(e.into().context(ctx.to_string())))
    }

    fn internal(self, ctx: impl std::fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::Internal(e.into().context(ctx.to_string())))
    }
}

fn user_error(msg: impl Into<String>) -> Failure {
    Failure::User(anyhow!(msg.into()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).user(format!("cannot read {}", path.display()))
}

/// Reads and compiles a program, rendering diagnostics as the error.
fn load_program(path: &Path) -> Result<RewardProgram, Failure> {
    let source = read_text(path)?;
    compile(&source).map_err(|diags| {
        let file = path.display().to_string();
        let lines: Vec<String> = diags.iter().map(|d| d.render(&file)).collect();
        user_error(format!("{file} does not compile\n{}", lines.join("\n")))
    })
}

fn print_lints(program: &RewardProgram, file: &str) {
    for d in lint(program) {
        println!("{}", d.render(file));
    }
}

pub fn synthesize(a: SynthesizeArgs, argv: &[String]) -> Res {
    let mut req = SynthesisRequest::new(a.game, a.mode);
    req.model = a.model.clone();
    req.seed = a.seed;
    let stored = match &a.offline {
        Some(path) => {
            let t = Transcript::from_json(&read_text(path)?).user(format!("{} is not a transcript", path.display()))?;
            Some(t)
        }
        None => None,
    };
    let mut client: Box<dyn ChatClient> = match &stored {
        Some(t) => Box::new(OfflinePlayer::from_transcript(t)),
        None => Box::new(
            LiveClient::from_env(a.endpoint.as_deref())
                .user("live synthesis needs an API key (or pass --offline)")?
                .with_min_interval(Duration::from_millis(a.min_interval_ms)),
        ),
    };

    let dir = create_run_dir(&a.runs_dir, a.game.name(), a.mode.name(), a.seed).internal("creating the run directory")?;
    let config = serde_json::json!({
        "game": a.game,
        "mode": a.mode,
        "model": req.model,
        "seed": req.seed,
        "decoding": req.decoding,
        "offline": a.offline.as_ref().map(|p| p.display().to_string()),
    });
    let mut manifest = RunManifest::new("synthesize", argv.to_vec(), config);
    if let Some(path) = &a.offline {
        manifest.add_input(&dir, path, "input_transcript.json").internal("recording the transcript input")?;
    }

    let outcome = run_pipeline(&req, client.as_mut());
    let transcript = match &outcome {
        Ok(s) => &s.transcript,
        Err(f) => &f.transcript,
    };
    manifest.write_output(&dir, "transcript.json", transcript.to_json().as_bytes()).internal("writing the transcript")?;
    match outcome {
        Ok(s) => {
            let mut source = s.program.source_text.clone();
            if !source.ends_with('\n') {
                source.push('\n');
            }
            manifest.write_output(&dir, "program.rw", source.as_bytes()).internal("writing the program")?;
            manifest.finish(&dir).internal("writing the manifest")?;
            print_lints(&s.program, "program.rw");
            println!("bounds: {}", s.bounds);
            println!("messages: {}", s.transcript.messages.len());
            println!("{}", dir.display());
            Ok(())
        }
        Err(f) => {
            manifest.finish(&dir).internal("writing the manifest")?;
            let mut msg = format!("{} (transcript saved in {})", f, dir.display());
            for d in &f.diagnostics {
                msg.push('\n');
                msg.push_str(&d.render("reply"));
            }
            Err(user_error(msg))
        }
    }
}

pub fn validate(a: ValidateArgs) -> Res {
    let file = a.program.display().to_string();
    let source = read_text(&a.program)?;
    let program = match compile(&source) {
        Ok(p) => p,
        Err(diags) => {
            if a.json {
                println!("{}", serde_json::json!({ "ok": false, "diagnostics": diags }));
            } else {
                for d in &diags {
                    eprintln!("{}", d.render(&file));
                }
            }
            return Err(user_error(format!("{file}: {} error(s)", diags.len())));
        }
    };
    let bounds = static_bounds(&program);
    let lints = lint(&program);
    let games = if a.game.is_empty() { Game::ALL.to_vec() } else { a.game.clone() };
    let fuzz = (a.fuzz > 0).then(|| fuzz_program(&program, &games, a.fuzz, a.seed));
    if a.json {
        let report = serde_json::json!({
            "ok": true,
            "helpers": program.helpers.len(),
            "bounds": bounds.to_string(),
            "clamped": bounds.within(&Interval::new(-1.0, 1.0)),
            "diagnostics": lints,
            "fuzz": fuzz,
        });
        println!("{}", serde_json::to_string_pretty(&report).internal("serializing the report")?);
        return Ok(());
    }
    println!("ok {file} ({} helpers)", program.helpers.len());
    for d in &lints {
        println!("{}", d.render(&file));
    }
    println!("bounds: {bounds}");
    if let Some(r) = fuzz {
        let names: Vec<&str> = r.games.iter().map(|g| g.name()).collect();
        println!(
            "fuzz: {} snapshots ({}), observed [{}, {}], {} traps, {}",
            r.samples,
            names.join(", "),
            r.observed_min,
            r.observed_max,
            r.traps,
            if r.sound { "within bounds" } else { "OUTSIDE BOUNDS" }
        );
        if !r.sound {
            return Err(Failure::Internal(anyhow!("observed rewards escape the static bounds")));
        }
    }
    Ok(())
}

pub fn replay(a: ReplayArgs) -> Res {
    let program = load_program(&a.program)?;
    let text = read_text(&a.trace)?;
    let trace = EpisodeTrace::from_jsonl(&text).user(format!("{} is not a valid trace", a.trace.display()))?;
    trace.validate().user(format!("{} is not a valid trace", a.trace.display()))?;
    let evals = replay_evaluations(&trace, &program);
    let mut out: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(fs::File::create(p).user(format!("cannot create {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["t", "reward", "trap", "true_score_delta", "done"]).internal("writing CSV")?;
    let mut traps = 0;
    for (rec, ev) in trace.records.iter().zip(&evals) {
        let trap = ev.trap.as_ref().map(|d| d.code.clone()).unwrap_or_default();
        traps += usize::from(ev.trapped());
        w.write_record([
            rec.snapshot.t.to_string(),
            ev.reward.to_string(),
            trap,
            rec.true_score_delta.to_string(),
            rec.done.to_string(),
        ])
        .internal("writing CSV")?;
    }
    w.flush().internal("writing CSV")?;
    if traps > 0 {
        eprintln!("{traps} step(s) trapped and scored 0");
    }
    Ok(())
}

/// `full` / `no_relations` when the program is one of the shipped
/// fixtures, else `custom`.
fn detect_mode(program: &RewardProgram, game: Game) -> String {
    fixtures::ALL
        .iter()
        .find(|f| f.game == game && &f.program() == program)
        .map(|f| f.mode.as_str().to_string())
        .unwrap_or_else(|| "custom".to_string())
}

pub fn train(a: TrainArgs, argv: &[String]) -> Res {
    if !a.game.simulated() {
        return Err(user_error(format!("{} has no simulator; train on freeway or pong", a.game)));
    }
    let program = load_program(&a.program)?;
    let cfg: TrainingConfig = match &a.config {
        Some(path) => serde_json::from_str(&read_text(path)?).user(format!("{} is not a training config", path.display()))?,
        None => TrainingConfig::default(),
    };
    cfg.validate().user("invalid training config")?;
    let mut env = EnvConfig::for_game(a.game, 0).user("environment")?;
    if let Some(h) = a.horizon {
        if h == 0 {
            return Err(user_error("--horizon must be positive"));
        }
        env.horizon = h;
    }
    let seeds = if a.config_seeds {
        cfg.seeds.clone()
    } else if a.seed.is_empty() {
        vec![42]
    } else {
        a.seed.clone()
    };
    if seeds.is_empty() {
        return Err(user_error("no seeds to train"));
    }
    let mode = a.mode.clone().unwrap_or_else(|| detect_mode(&program, a.game));

    let dir = create_run_dir(&a.runs_dir, a.game.name(), &mode, seeds[0]).internal("creating the run directory")?;
    let resolved = serde_json::json!({ "training": cfg, "env": env, "seeds": seeds, "game": a.game, "mode": mode });
    let mut manifest = RunManifest::new("train", argv.to_vec(), resolved);
    manifest.add_input(&dir, &a.program, "program.rw").internal("recording the program")?;
    if let Some(path) = &a.config {
        manifest.add_input(&dir, path, "config_input.json").internal("recording the config")?;
    }
    // A program written by `synthesize` sits next to its transcript.
    if let Some(t) = a.program.parent().map(|p| p.join("transcript.json")).filter(|p| p.is_file()) {
        manifest.add_input(&dir, &t, "transcript.json").internal("recording the transcript")?;
    }
    manifest.write_output(&dir, "config.json", (cfg.to_json() + "\n").as_bytes()).internal("writing config")?;
    let env_json = serde_json::to_string_pretty(&env).internal("serializing env config")? + "\n";
    manifest.write_output(&dir, "env.json", env_json.as_bytes()).internal("writing env config")?;

    let mut rows: Vec<MetricRow> = Vec::new();
    for &seed in &seeds {
        let quiet = a.quiet;
        let mut last_tenth = 0;
        let out = train_with_progress(&env, &program, &cfg, seed, |u, total| {
            let tenth = u * 10 / total.max(1);
            if !quiet && tenth > last_tenth {
                last_tenth = tenth;
                eprintln!("seed {seed}: update {u}/{total}");
            }
        })
        .map_err(|e| Failure::Internal(anyhow!(e).context(format!("training seed {seed}"))))?;
        let blob = checkpoint::encode(&out.agent, &out.config_hash);
        manifest
            .write_output(&dir, &format!("checkpoints/policy_seed{seed}.bin"), &blob)
            .internal("writing the checkpoint")?;
        let finals = |name: &str| {
            let v: Vec<f64> = out.metrics.iter().filter(|r| r.metric == name).map(|r| r.value).collect();
            analysis::mean(analysis::final_window(&v)).unwrap_or(f64::NAN)
        };
        println!(
            "seed {seed}: {} episodes, final synthesized return {:.3}, final true score {:.3}, {} reward traps",
            out.episodes,
            finals(SYNTH_RETURN),
            finals(TRUE_SCORE),
            out.reward_traps
        );
        rows.extend(out.metrics);
    }
    let mut csv = Vec::new();
    analysis::write_metrics_csv(&rows, &mut csv).internal("writing metrics")?;
    manifest.write_output(&dir, "metrics.csv", &csv).internal("writing metrics")?;
    manifest.finish(&dir).internal("writing the manifest")?;
    println!("{}", dir.display());
    Ok(())
}

pub fn report(a: ReportArgs) -> Res {
    if !a.run_dir.is_dir() {
        return Err(user_error(format!("{} is not a directory", a.run_dir.display())));
    }
    if a.run_dir.join(relreward_core::run::MANIFEST).is_file() {
        let m = RunManifest::open(&a.run_dir).user("unreadable manifest")?;
        m.verify(&a.run_dir).user("run directory does not match its manifest")?;
    }
    let report = analysis::summarize_run(&a.run_dir, a.window).user(format!("{}", a.run_dir.display()))?;
    for m in &report.metrics {
        println!("{:<20} {}", m.metric, m.display);
    }
    for (seed, c) in &report.correlation {
        match c {
            Some(c) => println!("seed {seed}: synthesized vs true pearson {:.3} spearman {:.3} (n={})", c.pearson, c.spearman, c.n),
            None => println!("seed {seed}: correlation undefined"),
        }
    }
    for (seed, n) in &report.reward_traps {
        println!("seed {seed}: {n} reward traps");
    }
    println!("wrote report.json, report.csv and curves.csv in {}", a.run_dir.display());
    Ok(())
}
