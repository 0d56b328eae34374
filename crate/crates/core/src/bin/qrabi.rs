use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrabi::scenario::{
    describe_preset, parse_scenario, preset, preset_names, run, RunOutcome, Scenario,
};
use qrabi::Error;
use rayon::prelude::*;

const EXIT_CONFIG: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qrabi",
    version,
    about = "JC / AJC dynamics of a two-level atom in a squeezed coherent field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (JSON).
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Compare against dense matrix propagation.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Reproduce one or more figure panels; `all` runs every preset.
    Preset {
        #[arg(required = true)]
        names: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// List the compiled-in figure presets.
    ListPresets,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

fn report(outcome: &RunOutcome) {
    let m = &outcome.manifest;
    println!(
        "{}: {} files, n_max = {}, tail mass = {:.3e}",
        outcome.out_dir.display(),
        m.files.len(),
        m.n_max,
        m.tail_mass
    );
    if let Some(o) = &m.oracle {
        for r in &o.reports {
            println!(
                "  oracle {:<20} max |diff| {:.3e} at tau {:.4}",
                r.label, r.max_abs_diff, r.argmax_tau
            );
        }
        println!(
            "  oracle check {} (tol {:e})",
            if o.passed { "passed" } else { "FAILED" },
            o.tolerance
        );
    }
}

fn run_many(jobs: Vec<(Scenario, PathBuf)>, oracle: bool) -> ExitCode {
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(s, dir)| run(s, dir, oracle))
        .collect();
    let mut code = 0u8;
    for r in results {
        match r {
            Ok(outcome) => {
                report(&outcome);
                if !outcome.oracle_passed() {
                    code = code.max(EXIT_ORACLE);
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(exit_code(&e));
            }
        }
    }
    ExitCode::from(code)
}

fn load(path: &Path) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_scenario(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::ListPresets => {
            for name in preset_names() {
                match describe_preset(&name) {
                    Ok(line) => println!("{line}"),
                    Err(e) => eprintln!("error: {e}"),
                }
            }
            return ExitCode::SUCCESS;
        }
        Command::Simulate {
            scenario,
            out,
            oracle,
            jobs,
        } => match load(&scenario) {
            Ok(s) => with_jobs(jobs, || run_many(vec![(s, out)], oracle)),
            Err(e) => Err(e),
        },
        Command::Preset {
            names,
            out,
            oracle,
            jobs,
        } => {
            let names = if names.iter().any(|n| n == "all") {
                preset_names()
            } else {
                names
            };
            let single = names.len() == 1;
            let resolved: Result<Vec<_>, _> = names
                .iter()
                .map(|n| preset(n).map(|s| (s, if single { out.clone() } else { out.join(n) })))
                .collect();
            match resolved {
                Ok(list) => with_jobs(jobs, || run_many(list, oracle)),
                Err(e) => Err(e),
            }
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
