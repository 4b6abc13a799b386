//! pncheck: batch checker for Poisson-Nijenhuis structure definitions.
//!
//! Reads a structure file (JSON or TOML), runs the selected check suites
//! and prints a human-readable or JSON report. Exit codes: 0 when every
//! selected non-skipped check passes, 1 when any check fails, 2 on input
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pn_core::structure::StructureDef;
use pn_core::suite::{run_structure, Suite, SuiteConfig};

#[derive(Debug, Parser)]
#[command(
    name = "pncheck",
    about = "Exact symbolic verification of Poisson-Nijenhuis structure identities on coordinate charts"
)]
struct Args {
    /// Structure definition file (.json or .toml).
    file: PathBuf,

    /// Suites to run: structure, compat, eq1, eq2, operator, modular,
    /// classes, or all. May be given several times or comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,

    /// Override the hierarchy depth from the file.
    #[arg(long)]
    kmax: Option<usize>,

    /// Number of random probes per randomized check.
    #[arg(long, default_value_t = 8)]
    trials: usize,

    /// Seed for the deterministic random streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output format.
    #[arg(long, value_parser = ["text", "json"], default_value = "text")]
    format: String,

    /// Run hypothesis-gated checks even when their preconditions fail;
    /// results are marked "unverified hypotheses".
    #[arg(long)]
    unchecked_hypotheses: bool,
}

fn input_error(msg: String) -> ExitCode {
    eprintln!("pncheck: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();

    let mut suites = Vec::new();
    for s in &args.suite {
        match Suite::parse(s) {
            Some(mut v) => suites.append(&mut v),
            None => return input_error(format!("unknown suite `{s}`")),
        }
    }
    suites.dedup_by_key(|s| s.name());

    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => return input_error(format!("cannot read {}: {e}", args.file.display())),
    };
    let ext = args.file.extension().and_then(|e| e.to_str());
    let def = match StructureDef::from_text(&text, ext) {
        Ok(d) => d,
        Err(e) => return input_error(format!("{}: {e}", args.file.display())),
    };
    let stem = args
        .file
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("structure")
        .to_string();
    let structure = match def.build(&stem) {
        Ok(s) => s,
        Err(e) => return input_error(format!("{}: {e}", args.file.display())),
    };

    let cfg = SuiteConfig {
        suites,
        trials: args.trials,
        seed: args.seed,
        kmax: args.kmax,
        unchecked_hypotheses: args.unchecked_hypotheses,
    };
    let report = run_structure(&structure, &cfg);

    match args.format.as_str() {
        "json" => println!("{}", report.to_json()),
        _ => print!("{}", report.to_text()),
    }

    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
