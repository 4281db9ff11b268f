use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use toric_mirror::cli::{self, ChiMode, CliError};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Validate,
    Inertia,
    Sequences,
    Gkz,
    Iseries,
    Mirror,
    Qring,
    Pairing,
    Checks,
}

impl Command {
    fn name(self) -> &'static str {
        cli::COMMANDS[self as usize]
    }
}

/// Exact mirror computations for toric stacks given by stacky fans.
///
/// Exit codes: 0 success, 2 validation failure, 3 ill-posed profile,
/// 4 internal invariant violation (including failed checks).
#[derive(Parser, Debug)]
#[command(name = "toric-mirror", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Fan document in the key-value format.
    input: PathBuf,
    /// Also write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Truncation override, e.g. qdeg=2,tord=0,yord=4.
    #[arg(long)]
    profile: Option<String>,
    /// `symbolic` or comma-separated rationals for χ.
    #[arg(long)]
    chi: Option<String>,
    /// 1-based maximal cone used for the splitting.
    #[arg(long)]
    sigma0: Option<usize>,
}

fn run(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| CliError::Validation(format!("{}: {}", args.input.display(), e)))?;
    let mut doc = cli::parse_input(&text)?;
    if let Some(p) = &args.profile {
        doc.profile = doc.profile.parse_over(p).map_err(CliError::Validation)?;
    }
    if let Some(c) = &args.chi {
        doc.chi = ChiMode::parse(c).map_err(CliError::Validation)?;
    }
    if let Some(s) = args.sigma0 {
        doc.sigma0 = s;
    }
    // re-validate after the overrides
    let doc = cli::parse_input(&doc.serialize())?;
    let report = cli::run(args.command.name(), &doc)?;
    print!("{}", report.to_text());
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json()).map_err(|e| CliError::Internal(format!("{}: {}", path.display(), e)))?;
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
