use std::path::PathBuf;
use std::process::ExitCode;

use adsorb_cli::{parse_config, CliError, Mode, Overrides};
use clap::{Args, Parser, Subcommand};

/// Fixed-bed adsorption: parameters, travelling waves, column simulations and Pe sweeps.
#[derive(Parser)]
#[command(name = "adsorb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nondimensionalize a physical parameter set.
    Nondim(Common),
    /// Travelling-wave profile (leading order at Pe = 0).
    Wave(Common),
    /// Method-of-lines column simulation.
    Pde(Common),
    /// Sensitivity of waves and breakthrough windows to Pe.
    Sweep(Common),
    /// Sips isotherm table.
    Isotherm(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Distance from F = 0 of the wave seed (overrides solver.seed_delta).
    #[arg(long)]
    seed_delta: Option<f64>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("ADSORB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!("ADSORB_THREADS must be a positive integer, got {value:?}"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn execute(mode: Mode, args: Common) -> Result<(), CliError> {
    configure_threads()?;
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let overrides = Overrides { out: args.out, seed_delta: args.seed_delta };
    let config = parse_config(&text, mode, &overrides)?;
    for path in adsorb_cli::run::run(&config)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Nondim(a) => (Mode::Nondim, a),
        Command::Wave(a) => (Mode::Wave, a),
        Command::Pde(a) => (Mode::Pde, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Isotherm(a) => (Mode::Isotherm, a),
    };
    match execute(mode, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
