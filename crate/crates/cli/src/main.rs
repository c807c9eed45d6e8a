//! `bergman-lab <scenario> --config <path> --out <dir> [--seed <u64>]`
//!
//! Writes `<dir>/<scenario>.csv` and `<dir>/<scenario>.json`. Exit status is 0
//! when every check passes, 1 when a check fails or a module errors, and 2 on
//! usage errors. `bergman-lab list` prints the scenario table.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_core::experiment::{list_scenarios, run, ExperimentConfig, Scenario};
use clap::Parser;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "bergman-lab",
    version,
    about = "Run a named Bergman-kernel experiment"
)]
struct Args {
    /// Scenario name, or `list`.
    scenario: String,
    /// JSON configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("bergman-lab: {msg}");
    ExitCode::from(2)
}

fn load_config(
    scenario: Scenario,
    path: Option<&Path>,
    seed: Option<u64>,
) -> Result<ExperimentConfig, String> {
    let mut value = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str::<Value>(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => json!({}),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| "config: expected a JSON object".to_string())?;
    match obj.get("scenario") {
        None => {
            obj.insert("scenario".into(), json!(scenario.name()));
        }
        Some(Value::String(s)) if s == scenario.name() => {}
        Some(other) => {
            return Err(format!(
                "scenario: config names {other}, command line names \"{}\"",
                scenario.name()
            ))
        }
    }
    let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(value)
        .map_err(|e| format!("{}: {}", e.path(), e.inner()))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BERGMAN_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            format!("BERGMAN_LAB_THREADS: expected a positive integer, got {v:?}")
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("BERGMAN_LAB_THREADS: {e}"))
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.scenario == "list" {
        for s in list_scenarios() {
            println!("{:<16} {} → {}", s.name, s.description, s.exercises);
        }
        return ExitCode::SUCCESS;
    }
    let Some(scenario) = Scenario::parse(&args.scenario) else {
        return usage(format!(
            "unknown scenario {:?}; try `bergman-lab list`",
            args.scenario
        ));
    };
    let cfg = match load_config(scenario, args.config.as_deref(), args.seed) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Err(e) = configure_threads() {
        return usage(e);
    }
    let out = args
        .out
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = fs::create_dir_all(&out) {
        return usage(format!("{}: {e}", out.display()));
    }
    let csv_path = out.join(format!("{}.csv", scenario.name()));
    let json_path = out.join(format!("{}.json", scenario.name()));

    let (csv, summary, pass) = match run(&cfg) {
        Ok(r) => {
            for c in &r.checks {
                println!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            let v = serde_json::to_value(&r).expect("report serializes");
            (r.csv, v, r.pass)
        }
        Err(e) => {
            println!("FAIL {}: {e}", scenario.name());
            let v = json!({"config": cfg, "error": e.to_string(), "pass": false});
            (String::new(), v, false)
        }
    };
    let text = serde_json::to_string_pretty(&summary).expect("report serializes") + "\n";
    if let Err(e) = fs::write(&csv_path, csv).and_then(|_| fs::write(&json_path, text)) {
        eprintln!("bergman-lab: writing reports: {e}");
        return ExitCode::from(1);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
