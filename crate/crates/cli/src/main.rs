use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ghostsim_cli::{cmd_eraser, cmd_pattern, cmd_sweep, cmd_validate, parse_config_with, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "ghostsim", version, about = "Ghost interference and nonlocal duality simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coincidence pattern of particle 2 with summary figures
    Pattern(RunArgs),
    /// Quantum-eraser patterns in the (d1 + d2) and (d1 - d2) bases
    Eraser(RunArgs),
    /// Summary figures over a list of values of one parameter
    Sweep(RunArgs),
    /// Closed forms against the grid oracle and structural checks
    Validate(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Config file of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = one per core)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Recorded in the manifest
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override a config value, e.g. --set sigma=4
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, args) = match &cli.command {
        Command::Pattern(a) => ("pattern", a),
        Command::Eraser(a) => ("eraser", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Validate(a) => ("validate", a),
    };
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let cfg = parse_config_with(&text, &args.set)?;
    let opts = RunOptions::resolve(&cfg, args.out.clone(), args.workers, args.seed);
    let files = match cli.command {
        Command::Pattern(_) => cmd_pattern(&cfg, &opts)?,
        Command::Eraser(_) => cmd_eraser(&cfg, &opts)?,
        Command::Sweep(_) => cmd_sweep(&cfg, &opts)?,
        Command::Validate(_) => {
            let (report, files) = cmd_validate(&cfg, &opts)?;
            print!("{}", report.render());
            if !report.passed() {
                return Err(CliError::Validation(format!("see {}", files[0].display())));
            }
            files
        }
    };
    for f in files {
        eprintln!("{name}: wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ghostsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
