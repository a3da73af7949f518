use std::path::PathBuf;
use std::process::ExitCode;

use casimir::config::{GeometryKind, Units};
use casimir::{apply_overrides, run, CliError, Overrides, ScenarioConfig, Subcommand};
use clap::{Args, Parser};

/// Ray dynamics, vacuum radiation forces and driven-plate dynamics in
/// spherical cavities.
#[derive(Parser)]
#[command(name = "casimir", version)]
enum Cli {
    /// Strike points of one ray (`[ray]` section).
    Trace(Common),
    /// Reflection count and escape class over hemisphere quadrature nodes.
    Classify(Common),
    /// Regularized radiation force over the quadrature nodes.
    Force(Common),
    /// One-dimensional parallel-plate force for each gap.
    Plates1d(Common),
    /// Time series of the driven two-plate system.
    Dyncas(Common),
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; defaults apply to every missing field.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, value_enum)]
    units: Option<Units>,
    /// Add reference-integrator columns (dyncas).
    #[arg(long)]
    verify: bool,
    /// CSV destination; metadata goes to `<out>.meta.json`. Without it the
    /// CSV goes to stdout and the metadata to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    geometry: Option<GeometryKind>,
    #[arg(long, allow_negative_numbers = true)]
    gap: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    radius: Option<f64>,
}

fn execute(sub: Subcommand, args: Common) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    let overrides = Overrides {
        seed: args.seed,
        nodes: args.nodes,
        units: args.units,
        geometry: args.geometry,
        gap: args.gap,
        radius: args.radius,
    };
    apply_overrides(&mut cfg, &overrides, sub);
    run(&cfg, sub, args.verify)?.emit(args.out.as_deref())
}

fn main() -> ExitCode {
    let (sub, args) = match Cli::parse() {
        Cli::Trace(a) => (Subcommand::Trace, a),
        Cli::Classify(a) => (Subcommand::Classify, a),
        Cli::Force(a) => (Subcommand::Force, a),
        Cli::Plates1d(a) => (Subcommand::Plates1d, a),
        Cli::Dyncas(a) => (Subcommand::Dyncas, a),
    };
    match execute(sub, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
