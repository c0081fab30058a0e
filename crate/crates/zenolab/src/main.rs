use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zenolab::{check, presets, runner, RunError};

#[derive(Parser)]
#[command(name = "zenolab", version, about = "Quantum Zeno dynamics scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config.
    Run {
        config: PathBuf,
        /// Write here instead of the config's output_path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in scenario.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the preset's config instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// List the built-in scenarios.
    ListPresets,
    /// Randomized invariant checks on seeded random operators.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

fn report(result: Result<(runner::Outcome, PathBuf), RunError>) -> ExitCode {
    match result {
        Ok((outcome, dir)) => {
            print!("{}", outcome.summary);
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out } => report(runner::run_file(&config, out.as_deref())),
        Command::Preset {
            name,
            out,
            print_config,
        } => {
            let Some(preset) = presets::find(&name) else {
                eprintln!(
                    "error: validation failed [UnknownPreset]: no preset named `{name}`; see `zenolab list-presets`"
                );
                return ExitCode::from(2);
            };
            let scenario = preset.scenario();
            if print_config {
                print!("{}", scenario.to_json());
                return ExitCode::SUCCESS;
            }
            report(runner::run(&scenario, out.as_deref()))
        }
        Command::ListPresets => {
            for p in &presets::PRESETS {
                println!("{:<24}{}", p.name, p.description);
            }
            ExitCode::SUCCESS
        }
        Command::Check { seed, cases } => match check::run(seed, cases) {
            Ok(results) => {
                for r in &results {
                    let verdict = if r.passed() { "ok  " } else { "FAIL" };
                    println!("{verdict} {:<44} worst {:.3e} (tol {:.0e})", r.name, r.worst, r.tol);
                }
                if results.iter().all(check::PropertyResult::passed) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(3)
                }
            }
            Err(err) => {
                let err = RunError::from(err);
                eprintln!("error: {err}");
                ExitCode::from(err.exit_code())
            }
        },
    }
}
