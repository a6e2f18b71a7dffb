use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use unitint_cli::run::run_scenario;
use unitint_cli::scenario::{Path, Scenario};
use unitint_cli::verify::{render_table, verify, ALL_CHECKS};

const EXIT_TOLERANCE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "unitint", version, about = "Factorized integration of unitary evolution operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files and write `<id>_trajectory.csv` and `<id>_report.json`.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the step count of every scenario.
        #[arg(long)]
        steps: Option<usize>,
        /// Override the path list, e.g. `factorized,oracle`.
        #[arg(long, value_delimiter = ',', value_parser = Path::parse)]
        paths: Option<Vec<Path>>,
    },
    /// Randomized invariant checks over a range of seeds.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
        /// Override a check tolerance, e.g. `--tolerance unitarity=1e-12`, or
        /// every tolerance with a bare value.
        #[arg(long = "tolerance", value_parser = parse_override)]
        tolerances: Vec<(String, f64)>,
    },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').unwrap_or((ALL_CHECKS, s));
    if name != ALL_CHECKS && !unitint_cli::verify::CHECKS.iter().any(|c| c.name == name) {
        return Err(format!("unknown check `{name}`"));
    }
    let value: f64 = value.parse().map_err(|e| format!("bad tolerance `{value}`: {e}"))?;
    Ok((name.to_string(), value))
}

fn load(file: &PathBuf, steps: Option<usize>, paths: &Option<Vec<Path>>) -> Result<Scenario, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let mut s = Scenario::parse(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    if let Some(steps) = steps {
        s.steps = steps;
    }
    if let Some(paths) = paths {
        s.paths = paths.clone();
    }
    s.validate().map_err(|e| format!("{}: {e}", file.display()))?;
    Ok(s)
}

fn run_one(file: &PathBuf, out: &std::path::Path, steps: Option<usize>, paths: &Option<Vec<Path>>) -> u8 {
    let s = match load(file, steps, paths) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let outcome = match run_scenario(&s) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}: {e}", s.id);
            return EXIT_SOLVER;
        }
    };
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    let written = fs::write(out.join(format!("{}_report.json", s.id)), json + "\n")
        .and_then(|_| fs::write(out.join(format!("{}_trajectory.csv", s.id)), &outcome.csv));
    if let Err(e) = written {
        eprintln!("error: {}: {e}", s.id);
        return EXIT_INPUT;
    }
    for v in &outcome.report.verdicts {
        println!(
            "{}: {} {:.3e} <= {:.1e} {}",
            s.id,
            v.name,
            v.measured,
            v.tolerance,
            if v.pass { "ok" } else { "FAIL" }
        );
    }
    if outcome.report.pass {
        0
    } else {
        EXIT_TOLERANCE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { files, out, steps, paths } => {
            if let Err(e) = fs::create_dir_all(&out) {
                eprintln!("error: {}: {e}", out.display());
                return ExitCode::from(EXIT_INPUT);
            }
            let codes: Vec<u8> = std::thread::scope(|scope| {
                let handles: Vec<_> =
                    files.iter().map(|f| scope.spawn(|| run_one(f, &out, steps, &paths))).collect();
                handles.into_iter().map(|h| h.join().unwrap_or(EXIT_SOLVER)).collect()
            });
            ExitCode::from(codes.into_iter().max().unwrap_or(0))
        }
        Command::Verify { seed, count, max_dim, tolerances } => {
            if max_dim < 2 {
                eprintln!("error: --max-dim must be at least 2");
                return ExitCode::from(EXIT_INPUT);
            }
            let summaries = verify(seed, count, max_dim, &tolerances);
            print!("{}", render_table(&summaries));
            if summaries.iter().all(|s| s.pass()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_TOLERANCE)
            }
        }
    }
}
