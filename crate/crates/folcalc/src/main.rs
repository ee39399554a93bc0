use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use folcalc::config::{parse_config, resolve, Overrides, OutputFormat};
use folcalc::error::Error;
use folcalc::output::{to_csv, to_json, to_table};
use folcalc::run::{run_check, run_compute, run_orbits};

/// Exact calculator for the basic cohomology of torus suspension
/// foliations defined by a unimodular integer matrix.
#[derive(Parser)]
#[command(name = "folcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the finite-orbit census with sizes and fiber dimensions
    Orbits(CommonArgs),
    /// Compute dimension profiles, growth verdicts, and checks
    Compute(CommonArgs),
    /// Run only the structural consistency checks
    Check(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML job configuration
    #[arg(long)]
    config: PathBuf,
    /// Output format (overrides the config)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Largest truncation radius N (overrides the config)
    #[arg(long)]
    max_n: Option<u32>,
    /// Trailing samples that must agree for stabilization (overrides the config)
    #[arg(long)]
    window: Option<usize>,
    /// Attach the per-orbit breakdown to the output
    #[arg(long)]
    per_orbit: bool,
}

/// Exit code families: 1 for rejected input, 2 for a matrix that fails a
/// requested structure check, 3 for internal inconsistencies that should
/// never happen on any input.
fn classify(error: &Error) -> u8 {
    match error {
        Error::InvalidInput { .. }
        | Error::NotSquare
        | Error::NotUnimodular { .. }
        | Error::StructureMissing { .. }
        | Error::InsufficientSamples { .. } => 1,
        Error::NotSymplectic
        | Error::NotComplexCompatible
        | Error::OddDimension { .. }
        | Error::OddCodimension { .. } => 2,
        Error::FrameMismatch
        | Error::AmbientMismatch { .. }
        | Error::NotContained { .. }
        | Error::NonInvariantImage { .. }
        | Error::SingularWedgePairing { .. }
        | Error::PropertyViolation { .. } => 3,
    }
}

fn execute(cli: Cli) -> Result<ExitCode, Error> {
    let (args, runner): (&CommonArgs, fn(&folcalc::config::Job) -> _) = match &cli.command {
        Command::Orbits(args) => (args, |job| run_orbits(job).map(|output| (output, false))),
        Command::Compute(args) => (args, |job| {
            run_compute(job).map(|outcome| (outcome.output, outcome.internal_failure))
        }),
        Command::Check(args) => (args, |job| {
            run_check(job).map(|outcome| (outcome.output, outcome.internal_failure))
        }),
    };

    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::InvalidInput {
        detail: format!("cannot read {}: {e}", args.config.display()),
    })?;
    let config = parse_config(&text)?;
    let overrides = Overrides {
        format: args.format,
        max_n: args.max_n,
        window: args.window,
        per_orbit: args.per_orbit,
    };
    let job = resolve(&config, &overrides)?;

    let (output, internal_failure) = runner(&job)?;
    let rendered = match job.format {
        OutputFormat::Json => to_json(&output)?,
        OutputFormat::Csv => to_csv(&output)?,
        OutputFormat::Table => to_table(&output),
    };
    print!("{rendered}");
    Ok(if internal_failure { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(classify(&error))
        }
    }
}
