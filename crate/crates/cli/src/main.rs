//! `levitsim`: scenario-driven front end for the levitated-optomechanics
//! toolkit. Scenarios are JSON files with explicit unit tags; every run
//! writes its artifacts plus a digest manifest into its own directory.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical/validity
//! error. Machine-readable error JSON goes to stderr.

use clap::{Parser, Subcommand};
use levitsim_cli::runner::{self, Format, RunError};
use levitsim_cli::scenario::{self, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;

#[derive(Parser)]
#[command(name = "levitsim", version, about = "Levitated-nanoparticle optomechanics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write CSV/JSON artifacts plus a manifest
    Run {
        /// Scenario files, or names from the shipped suite
        #[arg(required = true)]
        scenarios: Vec<String>,
        /// Override the scenario seed
        #[arg(long)]
        seed: Option<u64>,
        /// Output root (default: scenario `output`, $LEVITSIM_OUT, or ./levitsim-out)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scenarios to execute concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Tabular artifact encoding
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Parse a scenario and echo its resolved SI parameters
    Validate {
        scenario: String,
    },
    /// List the shipped scenario suite
    ListScenarios,
}

/// Shipped scenario suite, compiled in so `run <name>` works anywhere.
const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    ("velocity-distribution", include_str!("../../../scenarios/velocity-distribution.json")),
    ("feedback-ladder", include_str!("../../../scenarios/feedback-ladder.json")),
    ("sideband-optimum", include_str!("../../../scenarios/sideband-optimum.json")),
    ("noise-budget", include_str!("../../../scenarios/noise-budget.json")),
    ("fock-qnd", include_str!("../../../scenarios/fock-qnd.json")),
    ("cat-fringes", include_str!("../../../scenarios/cat-fringes.json")),
    ("force-vs-radius", include_str!("../../../scenarios/force-vs-radius.json")),
    ("force-vs-frequency", include_str!("../../../scenarios/force-vs-frequency.json")),
    ("collision-stream", include_str!("../../../scenarios/collision-stream.json")),
];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenarios, seed, out, jobs, format } => {
            run_many(&scenarios, seed, out, jobs.max(1), format)
        }
        Command::Validate { scenario } => validate(&scenario),
        Command::ListScenarios => {
            for (name, text) in BUILTIN_SCENARIOS {
                let kind = serde_json::from_str::<serde_json::Value>(text)
                    .ok()
                    .and_then(|v| v.get("kind").and_then(|k| k.as_str().map(String::from)))
                    .unwrap_or_default();
                println!("{name:24} {kind}");
            }
            ExitCode::SUCCESS
        }
    }
}

/// Load scenario text from a path, falling back to the shipped suite when
/// the argument names a built-in scenario.
fn load_text(arg: &str) -> Result<String, RunError> {
    let path = PathBuf::from(arg);
    if path.exists() {
        return std::fs::read_to_string(&path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    for (name, text) in BUILTIN_SCENARIOS {
        if *name == stem {
            return Ok((*text).to_string());
        }
    }
    Err(RunError::Config(format!(
        "scenario `{arg}` is neither a file nor a shipped scenario name"
    )))
}

fn load_scenario(arg: &str, seed_override: Option<u64>) -> Result<Scenario, RunError> {
    let text = load_text(arg)?;
    let mut sc = scenario::parse_scenario(&text).map_err(RunError::Config)?;
    if let Some(seed) = seed_override {
        sc.seed = seed;
        // Re-canonicalize so the manifest hash reflects the effective run.
        let mut v: serde_json::Value =
            serde_json::from_str(&sc.canonical).expect("canonical JSON");
        v["seed"] = serde_json::json!(seed);
        sc.canonical = serde_json::to_string(&v).expect("canonical JSON");
    }
    Ok(sc)
}

fn output_dir(sc: &Scenario, out: &Option<PathBuf>) -> PathBuf {
    let root = out
        .clone()
        .or_else(|| sc.output.clone())
        .or_else(|| std::env::var_os("LEVITSIM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("levitsim-out"));
    root.join(&sc.name)
}

fn run_many(
    args: &[String],
    seed: Option<u64>,
    out: Option<PathBuf>,
    jobs: usize,
    format: Format,
) -> ExitCode {
    // Parse everything first: configuration problems surface before any
    // work starts or files are written.
    let mut queue = Vec::new();
    for arg in args {
        match load_scenario(arg, seed) {
            Ok(sc) => queue.push(sc),
            Err(e) => {
                eprintln!("{}", e.to_json(arg));
                return ExitCode::from(e.exit_code());
            }
        }
    }

    let work = Mutex::new(queue);
    let failures = Mutex::new(Vec::<u8>::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(args.len()) {
            scope.spawn(|| loop {
                let Some(sc) = work.lock().unwrap().pop() else { break };
                let dir = output_dir(&sc, &out);
                match runner::run_scenario(&sc, &dir, format) {
                    Ok(manifest) => {
                        println!("{}: ok ({})", sc.name, manifest.display());
                    }
                    Err(e) => {
                        eprintln!("{}", e.to_json(&sc.name));
                        failures.lock().unwrap().push(e.exit_code());
                    }
                }
            });
        }
    });

    match failures.into_inner().unwrap().into_iter().max() {
        None => ExitCode::SUCCESS,
        Some(code) => ExitCode::from(code),
    }
}

fn validate(arg: &str) -> ExitCode {
    let sc = match load_scenario(arg, None) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("{}", e.to_json(arg));
            return ExitCode::from(e.exit_code());
        }
    };
    match runner::resolve_only(&sc) {
        Ok(resolved) => {
            let echo = serde_json::json!({
                "name": sc.name,
                "kind": sc.kind.label(),
                "seed": sc.seed,
                "valid": true,
                "resolved_si": resolved,
            });
            println!("{}", serde_json::to_string_pretty(&echo).unwrap());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json(&sc.name));
            ExitCode::from(e.exit_code())
        }
    }
}
