use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use polyens_cli::{run, CliError, Command, Format, Outcome, RunConfig, EXIT_CHECK_FAILED};

/// Characteristic-polynomial averages, Schur expectations and correlation
/// kernels of polynomial ensembles, checked against independent oracles.
#[derive(Debug, Parser)]
#[command(name = "polyens", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON configuration file, or `-` for standard input.
    #[arg(long)]
    config: String,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `numerics.seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    /// Print progress and failed checks to standard error.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CliFormat {
    Json,
    Csv,
}

fn read_config(source: &str) -> Result<RunConfig, CliError> {
    let text = if source == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Config(format!("cannot read stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(source).map_err(|e| CliError::Config(format!("cannot read {source}: {e}")))?
    };
    RunConfig::parse(&text)
}

fn write(outcome: &Outcome, format: Format, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(
            fs::File::create(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let io_err = |e: io::Error| CliError::Config(format!("cannot write output: {e}"));
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &outcome.report)
                .map_err(|e| CliError::Config(format!("cannot write output: {e}")))?;
            writeln!(sink).map_err(io_err)?;
        }
        Format::Csv => outcome.table.write_csv(&mut sink)?,
    }
    sink.flush().map_err(io_err)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = read_config(&args.config).and_then(|cfg| {
        let format = match args.format {
            Some(CliFormat::Json) => Format::Json,
            Some(CliFormat::Csv) => Format::Csv,
            None => cfg.output.format,
        };
        let out = args.out.clone().or_else(|| cfg.output.path.clone().map(PathBuf::from));
        if args.verbose {
            eprintln!("polyens {}: {} parameters", args.command.name(), cfg.ensemble.a().len());
        }
        let outcome = run(args.command, cfg, args.seed)?;
        write(&outcome, format, out)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for c in outcome.report.failed_checks() {
                eprintln!("check failed: {} gap {:.3e} exceeds {:.1e}", c.name, c.gap, c.tol);
            }
            if args.verbose {
                eprintln!("{} checks in {:.2}s", outcome.report.checks.len(), outcome.report.wall_time_s);
            }
            if outcome.report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
