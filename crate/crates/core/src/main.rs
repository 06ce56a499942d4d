use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isogroup::obstruct::{self, Config, Verdict};
use isogroup::Result;

#[derive(Parser)]
#[command(name = "isogroup", version, about = "Discrete Euclidean isometry groups: growth, conjugation and obstruction analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a triple (n, dim Γ, dim Γ_T).
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
    },
    /// Run the full pipeline and write report.json and growth.csv.
    Analyze {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Conjugation invariance and index for the configured conformal map.
    Conjugation { config: PathBuf },
    /// Orthogonal half-line selection on the complement of the pair's subspace.
    SelectLines { config: PathBuf },
    /// Print the growth table as CSV.
    Growth {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify { n, k, l } => {
            let report = obstruct::classify(n, k, l);
            print_json(&report)?;
            Ok(if report.verdict == Verdict::InvalidInput { 2 } else { 0 })
        }
        Command::Analyze { config, out } => {
            let outcome = obstruct::run_pipeline(&config, &out)?;
            let r = &outcome.report;
            println!(
                "n={} k_hat={} (slope {:.3}) l={} verdict={:?}",
                r.n, r.dimension.k_hat, r.dimension.slope, r.translation_lattice.rank, r.classification.verdict
            );
            println!("wrote {}", outcome.report_path.display());
            println!("wrote {}", outcome.csv_path.display());
            Ok(outcome.exit_code as u8)
        }
        Command::Conjugation { config } => {
            let problem = Config::load(config)?.validate()?;
            print_json(&obstruct::conjugation_analysis(&problem)?)?;
            Ok(0)
        }
        Command::SelectLines { config } => {
            let problem = Config::load(config)?.validate()?;
            print_json(&obstruct::line_selection(&problem)?)?;
            Ok(0)
        }
        Command::Growth { config, radii } => {
            let problem = Config::load(config)?.validate()?;
            let radii = radii.unwrap_or_else(|| problem.radii.clone());
            if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(isogroup::Error::InvalidArgument("radii must be positive".into()));
            }
            let profile = obstruct::growth_table(&problem, &radii)?;
            profile.write_csv(std::io::stdout().lock())?;
            Ok(if profile.complete { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
