use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use arbdot_bench::bench::{run_bench, BenchSpec, Operation, CSV_HEADER};
use arbdot_bench::profiles::Profile;
use arbdot_bench::verify::{run_verify, size_cap, Suite};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arbdot-bench", version, about = "Benchmarks and oracle checks for arbdot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time one operation against its naive baseline and print a CSV row.
    Bench {
        #[arg(long)]
        op: Operation,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        prec: u64,
        #[arg(long, default_value = "uniform")]
        profile: Profile,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Append the row to this file, writing the header if it is new.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run randomized checks against the exact oracles.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn append_csv(path: &PathBuf, row: &str) -> std::io::Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{CSV_HEADER}")?;
    }
    writeln!(f, "{row}")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Bench {
            op,
            n,
            prec,
            profile,
            reps,
            seed,
            csv,
        } => {
            if let Some(cap) = size_cap() {
                if n > cap {
                    eprintln!("error: size {n} exceeds ARBDOT_MAX_SIZE={cap}");
                    return ExitCode::from(2);
                }
            }
            let spec = BenchSpec {
                op,
                n,
                p: prec,
                profile,
                reps,
                seed,
            };
            let result = match run_bench(&spec) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let row = result.csv_row();
            println!("{CSV_HEADER}");
            println!("{row}");
            if let Some(path) = csv {
                if let Err(e) = append_csv(&path, &row) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Verify { suite, trials, seed } => {
            let report = run_verify(suite, trials, seed);
            print!("{report}");
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
