//! `radiant` — deterministic sweep runner for 1D atomic arrays in a
//! spatially periodic magnetic field.
//!
//! Subcommands map one-to-one onto the run drivers: `butterfly` (projected
//! spectrum versus flux), `sweep-phi` (open-chain spectrum, labels, and
//! branches versus modulation phase), `modes` (per-mode intensity profiles
//! in a detuning window), and `greens-check` (coupling-kernel validation
//! dump). Parameters come from an optional `key = value` config file; every
//! flag mirrors a config key and overrides it. Outputs are byte-identical
//! across reruns.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-contract
//! violation, 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use radiant_core::config::{parse_config, ChainConfig, Numerics};
use radiant_core::error::Error;
use radiant_core::runs::{
    run_butterfly, run_greens_check, run_modes, run_sweep_phi, RunCommand, RunManifest,
};

#[derive(Parser)]
#[command(name = "radiant", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Config file (`key = value`); flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default `radiant-out`, or $RADIANT_OUTPUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Number of atoms N.
    #[arg(long)]
    n_atoms: Option<usize>,

    /// Lattice spacing a/λ.
    #[arg(long)]
    spacing: Option<f64>,

    /// Zeeman amplitude μB₀/γ₀.
    #[arg(long)]
    zeeman_amp: Option<f64>,

    /// Modulation frequency b ∈ (0, 1).
    #[arg(long)]
    flux: Option<f64>,

    /// Modulation phase φ.
    #[arg(long)]
    phase: Option<f64>,

    /// Eigenpair residual tolerance.
    #[arg(long)]
    tol_eig: Option<f64>,

    /// Light-line exclusion half-width.
    #[arg(long)]
    eps_light: Option<f64>,

    /// Truncation length for the truncated lattice sums.
    #[arg(long)]
    l_max: Option<usize>,

    /// Largest supercell for rational flux approximation.
    #[arg(long)]
    q_max: Option<usize>,

    /// Bloch momentum samples per zone.
    #[arg(long)]
    k_samples: Option<usize>,

    /// Phase samples for Bloch projections.
    #[arg(long)]
    phase_samples: Option<usize>,

    /// φ-grid size for open-chain sweeps.
    #[arg(long)]
    phi_samples: Option<usize>,

    /// Farey order of the butterfly flux grid.
    #[arg(long)]
    farey_order: Option<usize>,

    /// Minimum reported gap width.
    #[arg(long)]
    min_gap_width: Option<f64>,

    /// In-gap margin from sampled band edges.
    #[arg(long)]
    band_edge_tol: Option<f64>,

    /// Boundary window (atoms) for classification.
    #[arg(long)]
    edge_window: Option<usize>,

    /// Boundary-weight threshold.
    #[arg(long)]
    edge_threshold: Option<f64>,

    /// Polarization-fraction threshold.
    #[arg(long)]
    pol_threshold: Option<f64>,

    /// Hybridization margin outside gap edges for branch tracking.
    #[arg(long)]
    band_edge_exclusion: Option<f64>,

    /// Branch continuation tolerance factor.
    #[arg(long)]
    branch_jump_factor: Option<f64>,

    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Projected Bloch spectrum over a Farey grid of fluxes.
    Butterfly(CommonArgs),
    /// Open-boundary spectrum, mode labels, and boundary branches vs φ.
    SweepPhi(CommonArgs),
    /// Intensity profiles of modes in a detuning window at one phase.
    Modes {
        #[command(flatten)]
        common: CommonArgs,
        /// Detuning window: lower and upper edge in γ₀ units.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        window: Vec<f64>,
        /// Also dump the dense Hamiltonian as CSV (debug aid).
        #[arg(long)]
        dump_hamiltonian: bool,
    },
    /// Coupling-kernel and lattice-sum validation dump.
    GreensCheck(CommonArgs),
}

/// Defaults used when neither a config file nor flags specify the chain.
/// These are the headline parameters of the boundary-state experiments.
fn default_config() -> ChainConfig {
    ChainConfig::new(101, 0.1, 10.0, 5f64.sqrt() / 10.0, 0.0).expect("valid defaults")
}

fn resolve(common: &CommonArgs, command: RunCommand) -> Result<RunManifest, Error> {
    let (mut config, mut numerics) = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::io("reading config file", path.clone(), e))?;
            parse_config(&text)?
        }
        None => (default_config(), Numerics::default()),
    };

    if common.n_atoms.is_some()
        || common.spacing.is_some()
        || common.zeeman_amp.is_some()
        || common.flux.is_some()
        || common.phase.is_some()
    {
        config = ChainConfig::new(
            common.n_atoms.unwrap_or(config.n_atoms()),
            common.spacing.unwrap_or(config.spacing()),
            common.zeeman_amp.unwrap_or(config.zeeman_amp()),
            common.flux.unwrap_or(config.flux()),
            common.phase.unwrap_or(config.phase()),
        )?;
    }

    macro_rules! override_field {
        ($($field:ident),*) => {
            $(if let Some(v) = common.$field { numerics.$field = v; })*
        };
    }
    override_field!(
        tol_eig,
        eps_light,
        l_max,
        q_max,
        k_samples,
        phase_samples,
        phi_samples,
        farey_order,
        min_gap_width,
        band_edge_tol,
        edge_window,
        edge_threshold,
        pol_threshold,
        band_edge_exclusion,
        branch_jump_factor,
        threads
    );

    let out = common
        .out
        .clone()
        .or_else(|| std::env::var_os("RADIANT_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("radiant-out"));

    Ok(RunManifest::new(command, config, numerics, out))
}

fn exit_code_for(err: &Error) -> u8 {
    match err.root() {
        Error::Config(_) | Error::ConfigParse { .. } | Error::NonFinite(_) => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

fn run() -> Result<Vec<PathBuf>, Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Butterfly(common) => {
            let manifest = resolve(common, RunCommand::Butterfly)?;
            run_butterfly(&manifest)
        }
        Command::SweepPhi(common) => {
            let manifest = resolve(common, RunCommand::SweepPhi)?;
            run_sweep_phi(&manifest)
        }
        Command::Modes {
            common,
            window,
            dump_hamiltonian,
        } => {
            let manifest = resolve(common, RunCommand::Modes)?;
            let phase = manifest.config.phase();
            let mut paths = run_modes(&manifest, phase, (window[0], window[1]))?;
            if *dump_hamiltonian {
                paths.push(radiant_core::runs::dump_hamiltonian(&manifest, phase)?);
            }
            Ok(paths)
        }
        Command::GreensCheck(common) => {
            let manifest = resolve(common, RunCommand::GreensCheck)?;
            run_greens_check(&manifest)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
