use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dnls_cli::exponents_cmd::{exponents_report, parse_rational};
use dnls_cli::{parse_config, parse_sweep, plotdata_dir, run_sweep, run_to_dir, verify_dir, CliError, PlotKind};

#[derive(Parser)]
#[command(name = "dnls", version, about = "Dissipative NLS runs, sweeps and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration; exit 0 on success, 2 on a guard abort, 1 on a config error.
    Run {
        config: PathBuf,
        /// Output directory (default: runs/<run_id>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every point of a sweep spec and write summary.csv.
    Sweep {
        spec: PathBuf,
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
    },
    /// Re-run the checks on a run directory and write report.txt; nonzero exit on any failure.
    Verify { dir: PathBuf },
    /// Write plot_<kind>.dat into a run directory.
    Plotdata {
        dir: PathBuf,
        #[arg(long)]
        kind: PlotKind,
    },
    /// Print the exponent set for (d, p), computed exactly.
    Exponents {
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Re and Im parts of λ, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out } => {
            let parsed = match parse_config(&config) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("runs").join(parsed.run_id()));
            match run_to_dir(&parsed, &dir) {
                Ok(outcome) => {
                    println!("{} {} samples -> {}", outcome.run_id, outcome.series.len(), dir.display());
                    if let Some(reason) = &outcome.aborted {
                        eprintln!("aborted: {reason}");
                    }
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Sweep { spec, out } => {
            let spec = match parse_sweep(&spec) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match run_sweep(&spec, &out) {
                Ok(outcome) => {
                    let bad = outcome.rows.iter().filter(|r| r.status != "completed").count();
                    println!(
                        "{} runs ({} not completed) on {} workers -> {}",
                        outcome.rows.len(),
                        bad,
                        outcome.workers,
                        out.join(dnls_cli::sweep::SUMMARY_FILE).display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Verify { dir } => match verify_dir(&dir) {
            Ok((text, ok)) => {
                print!("{text}");
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Plotdata { dir, kind } => match plotdata_dir(&dir, kind) {
            Ok(path) => {
                println!("{}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Exponents { d, p, lambda } => {
            let p = match parse_rational(&p) {
                Ok(p) => p,
                Err(e) => return fail(CliError::Usage(format!("--p: {e}"))),
            };
            let lambda = match lambda.as_deref().map(|s| {
                let (re, im) = s.split_once(',').ok_or("expected re,im")?;
                Ok::<_, String>((parse_rational(re)?, parse_rational(im)?))
            }) {
                None => None,
                Some(Ok(l)) => Some(l),
                Some(Err(e)) => return fail(CliError::Usage(format!("--lambda: {e}"))),
            };
            match exponents_report(d, p, lambda) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
