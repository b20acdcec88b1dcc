//! `twinsg`: scans, figure curves, noise studies, λ estimation and the
//! invariant self-test for the twin-atom double Stern-Gerlach interferometer.

mod angle;
mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use angle::parse_angle;
use output::Format;

const EXIT_CODES: &str = "\
Exit status:
  0  success
  1  invalid argument
  2  file could not be read or written
  3  malformed input file
  4  fit failed
  5  self-test found a failing invariant";

#[derive(Parser, Debug)]
#[command(name = "twinsg", version, about = "Twin spin-1 atoms in a double Stern-Gerlach interferometer", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to json for a `.json` output path, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Phase on the left arm, in radians (`pi/2`, `3pi/2` and the like accepted).
    #[arg(long = "phi-l", value_parser = parse_angle, default_value = "pi/2", allow_hyphen_values = true)]
    phi_l: f64,
    /// Points on the inclusive φ_R grid over [0, 2π].
    #[arg(long, default_value_t = 512)]
    grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InjectedFault {
    TransposedD,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coincidence rate against φ_R for one coherence value.
    Scan {
        /// Coherence λ in [0, 1].
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The λ = 0, 1/2, 1 curves in one table with a lambda column.
    Curves {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Percentile bands and distinguishability under multiplicative phase noise.
    Noise {
        #[command(flatten)]
        curve: CurveArgs,
        /// Relative noise amplitude in [0, 1).
        #[arg(long = "rel-amp", default_value_t = 0.15, allow_hyphen_values = true)]
        rel_amp: f64,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: Dist,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit λ and the constant C to a scan file and report purity.
    Estimate {
        /// Scan output in CSV or JSON.
        input: PathBuf,
        /// Overrides the φ_L recorded in the file.
        #[arg(long = "phi-l", value_parser = parse_angle, allow_hyphen_values = true)]
        phi_l: Option<f64>,
        /// Report format; plain text when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "inject-fault", value_enum, hide = true)]
        inject_fault: Option<InjectedFault>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let result = match cli.command {
        Command::Scan { lambda, curve, output } => commands::scan(lambda, curve.phi_l, curve.grid, &output),
        Command::Curves { curve, output } => commands::curves(curve.phi_l, curve.grid, &output),
        Command::Noise { curve, rel_amp, dist, samples, seed, output } => {
            commands::noise(curve.phi_l, curve.grid, rel_amp, dist, samples, seed, &output)
        }
        Command::Estimate { input, phi_l, format } => commands::estimate(&input, phi_l, format),
        Command::Selftest { seed, inject_fault } => commands::selftest(seed, inject_fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twinsg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
