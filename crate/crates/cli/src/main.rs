//! `retro`: list, run and replay round-trip test suites.
//!
//! Exit codes: 0 when every trial passes, 1 when any trial is a violation or
//! program error, 2 on configuration or usage errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use retromorphic::external::{external_identity_suite, ExternalProgram, Role};
use retromorphic::pipeline::replay_trial;
use retromorphic::registry::{listing_line, registry};
use retromorphic::report::{write_jsonl, RunConfigFile};
use retromorphic::{find_suite, run_suite, ConfigError, Suite, SuiteConfig, SuiteSummary};

const EXIT_FAILURES: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "retro",
    version,
    about = "Round-trip (forward/backward program) test harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered suites with their mode and variants.
    List,
    /// Run a suite and summarize the verdicts.
    ///
    /// Values come from, in decreasing precedence: flags, the --config file,
    /// RETRO_SEED (seed only), built-in defaults.
    Run(RunArgs),
    /// Re-execute one trial from its reported seed and print the transcript.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct Overrides {
    /// Variant id (default "correct").
    #[arg(long)]
    variant: Option<String>,
    /// Relation tolerance (default 1e-10).
    #[arg(long)]
    eps: Option<f64>,
    /// Work bound per program execution (default 10000000).
    #[arg(long = "step-cap")]
    step_cap: Option<u64>,
    /// Shell command for the forward program (suite `external` only).
    #[arg(long = "forward-cmd")]
    forward_cmd: Option<String>,
    /// Shell command for the backward program (suite `external` only).
    #[arg(long = "backward-cmd")]
    backward_cmd: Option<String>,
    /// Response timeout for external programs, in milliseconds.
    #[arg(long = "timeout-ms", default_value_t = 10_000)]
    timeout_ms: u64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write one JSON record per trial to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// TOML file with suite/variant/iterations/seed/eps/step_cap/report_path.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    suite: String,
    #[arg(long = "trial-seed")]
    trial_seed: u64,
    /// Index to label the replayed trial with.
    #[arg(long = "trial-index", default_value_t = 0)]
    trial_index: u64,
    /// Use this input instead of the generated one (e.g. `12`, `[1,0,1,0]`, `56a*+`).
    #[arg(long)]
    input: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
}

fn seed_from_env() -> Result<Option<u64>, ConfigError> {
    match std::env::var("RETRO_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| {
            ConfigError::InvalidParameter(format!(
                "RETRO_SEED `{s}` is not a 64-bit unsigned integer"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn resolve_suite(name: &str, o: &Overrides) -> Result<Arc<dyn Suite>, ConfigError> {
    if name != "external" {
        return find_suite(name);
    }
    let timeout = Duration::from_millis(o.timeout_ms);
    let (Some(fwd), Some(bwd)) = (&o.forward_cmd, &o.backward_cmd) else {
        return Err(ConfigError::InvalidParameter(
            "suite `external` needs --forward-cmd and --backward-cmd".to_owned(),
        ));
    };
    let shell = |cmd: &str| vec!["sh".to_owned(), "-c".to_owned(), cmd.to_owned()];
    let forward = ExternalProgram::spawn(Role::Forward, shell(fwd), timeout)?;
    let backward = ExternalProgram::spawn(Role::Backward, shell(bwd), timeout)?;
    Ok(Arc::new(external_identity_suite(forward, backward)))
}

fn apply_overrides(cfg: &mut SuiteConfig, o: &Overrides) {
    if let Some(v) = &o.variant {
        cfg.variant_id = v.clone();
    }
    if let Some(e) = o.eps {
        cfg.eps = e;
    }
    if let Some(k) = o.step_cap {
        cfg.step_cap = k;
    }
}

// Output errors (e.g. a closed pipe) are ignored; the exit code carries the result.
fn print_summary(summary: &SuiteSummary, iterations: u64) {
    let mut out = io::stdout().lock();
    let _ = writeln!(
        out,
        "suite={} variant={} iterations={} pass={} violation={} program_error={}",
        summary.suite,
        summary.variant_id,
        iterations,
        summary.pass,
        summary.violation,
        summary.program_error
    );
    let _ = match summary.first_failure {
        Some((index, seed)) => writeln!(out, "first failure: trial {index}, trial seed {seed}"),
        None => writeln!(out, "first failure: none"),
    };
    let _ = writeln!(out, "wall time: {:.3}s", summary.wall_time.as_secs_f64());
}

fn cmd_list() -> Result<u8, ConfigError> {
    let mut out = io::stdout().lock();
    for suite in registry() {
        let _ = writeln!(out, "{}", listing_line(suite.as_ref()));
    }
    Ok(0)
}

fn cmd_run(args: RunArgs) -> Result<u8, ConfigError> {
    let file = args
        .config
        .as_deref()
        .map(RunConfigFile::load)
        .transpose()?;
    let mut cfg = file
        .as_ref()
        .map(RunConfigFile::suite_config)
        .unwrap_or_default();
    if file.as_ref().and_then(|f| f.seed).is_none() {
        if let Some(seed) = seed_from_env()? {
            cfg.master_seed = seed;
        }
    }
    if let Some(n) = args.iterations {
        cfg.iterations = n;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    apply_overrides(&mut cfg, &args.overrides);
    let suite_name = args
        .suite
        .or_else(|| file.as_ref().map(|f| f.suite.clone()))
        .ok_or_else(|| {
            ConfigError::InvalidParameter("--suite or --config is required".to_owned())
        })?;
    let report_path = args.report.or_else(|| file.and_then(|f| f.report_path));

    let suite = resolve_suite(&suite_name, &args.overrides)?;
    let (summary, reports) = run_suite(suite.as_ref(), &cfg)?;
    if let Some(path) = report_path {
        let out = File::create(&path).map_err(|e| {
            ConfigError::InvalidParameter(format!("cannot create report {}: {e}", path.display()))
        })?;
        write_jsonl(BufWriter::new(out), &reports).map_err(|e| {
            ConfigError::InvalidParameter(format!("cannot write report {}: {e}", path.display()))
        })?;
    }
    print_summary(&summary, cfg.iterations);
    Ok(if summary.all_passed() {
        0
    } else {
        EXIT_FAILURES
    })
}

fn cmd_replay(args: ReplayArgs) -> Result<u8, ConfigError> {
    let mut cfg = SuiteConfig {
        iterations: args.trial_index.saturating_add(1),
        ..SuiteConfig::default()
    };
    apply_overrides(&mut cfg, &args.overrides);
    let suite = resolve_suite(&args.suite, &args.overrides)?;
    let report = replay_trial(
        suite.as_ref(),
        &cfg,
        args.trial_index,
        args.trial_seed,
        args.input.as_deref(),
    )?;
    let mut out = io::stdout().lock();
    let _ = out.write_all(report.render_transcript().as_bytes());
    let _ = out.flush();
    Ok(if report.verdict.is_pass() {
        0
    } else {
        EXIT_FAILURES
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::List => cmd_list(),
        Command::Run(args) => cmd_run(args),
        Command::Replay(args) => cmd_replay(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
