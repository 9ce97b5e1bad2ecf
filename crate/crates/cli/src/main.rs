use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opsim::{run_kfit, run_phase_scan, run_tomography, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "opsim",
    about = "Simulates superposed photon creation/annihilation sequences on thermal light: \
             phase scans, homodyne tomography and commutator-constant fits"
)]
struct Cli {
    /// Path to the experiment config (JSON). Omit to use built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for data products.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for per-phase parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the superposition phase and emit one quadrature histogram per φ.
    Scan,
    /// Reconstruct the state at one phase by maximum likelihood and emit
    /// Wigner grids and fidelities.
    Tomo {
        /// Superposition phase in radians (default π, the anticommutator).
        #[arg(long, default_value_t = std::f64::consts::PI)]
        phi: f64,
        /// Sample count (default: 10^4 for φ ≤ π/2, 10^5 otherwise).
        #[arg(long)]
        samples: Option<usize>,
        /// Reconstructed Fock levels (default: 11 for φ ≤ π/2, 14 otherwise).
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Simulate anticommutator data at the configured K and fit K back.
    Kfit,
    /// Validate the config file and exit.
    Validate,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let config = load_config(&cli)?;
    match cli.command {
        Command::Scan => {
            let summary = run_phase_scan(&config, &cli.out)?;
            println!(
                "scan: {} phases, {} samples each -> {}",
                summary.phases.len(),
                config.samples_per_phase,
                cli.out.display()
            );
        }
        Command::Tomo {
            phi,
            samples,
            levels,
        } => {
            let summary = run_tomography(&config, phi, samples, levels, &cli.out)?;
            println!(
                "tomo: phi = {:.4}, {} samples, {} levels -> {}",
                summary.phi,
                summary.samples,
                summary.levels,
                cli.out.display()
            );
            println!(
                "  fidelity(in, out) uncorrected = {:.4}, corrected = {:.4}",
                summary.fidelity_io_uncorrected, summary.fidelity_io_corrected
            );
            println!(
                "  W(0,0) corrected = {:+.5}, uncorrected = {:+.5}",
                summary.corrected.w00, summary.uncorrected.w00
            );
        }
        Command::Kfit => {
            let (summary, fit) = run_kfit(&config, &cli.out)?;
            println!(
                "kfit: truth K = {}, {} samples -> {}",
                summary.k_truth, summary.samples, summary.formatted
            );
            println!("  sigma_K = {:.4} ({:?})", fit.sigma_k, fit.method);
        }
        Command::Validate => {
            config.validate()?;
            println!("config ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
