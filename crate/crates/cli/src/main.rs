//! Batch front-end over the radial Yamabe toolkit: declarative TOML
//! scenarios in, deterministic JSON/CSV artifacts out.
//!
//! Exit codes: 0 on success, 2 when a certificate comes back
//! inconclusive, 1 on any error.

mod config;
mod ops;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::CommandKind;

#[derive(Parser)]
#[command(
    name = "yamabe",
    version,
    about = "Numerical laboratory for the Yamabe problem of negative curvature type \
             on radially symmetric geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Directory for output artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweep cases
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for auxiliary randomized sampling; never touches solver paths
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute whatever command the scenario file declares
    Run(Common),
    /// Volume-ratio certificate for a negative first eigenvalue
    Certify(Common),
    /// First Dirichlet eigenvalue of the radial conformal Laplacian
    Eigen(Common),
    /// Blow-up solution of the radial Yamabe equation on an annulus
    YamabeAnnulus(Common),
    /// Sub-/super-solution construction and verification
    Barriers(Common),
    /// Conformal classification of a warped-product end
    Classify(Common),
    /// Eigenvalue sign against the characteristic-root bound
    Sharpness(Common),
    /// Exponential decay check against a locally hyperbolic reference
    AlhCheck(Common),
    /// Certificate sweep over (beta, W, R) ranges
    Sweep(Common),
}

impl Command {
    fn parts(&self) -> (Option<CommandKind>, &Common) {
        match self {
            Command::Run(c) => (None, c),
            Command::Certify(c) => (Some(CommandKind::Certify), c),
            Command::Eigen(c) => (Some(CommandKind::Eigen), c),
            Command::YamabeAnnulus(c) => (Some(CommandKind::YamabeAnnulus), c),
            Command::Barriers(c) => (Some(CommandKind::Barriers), c),
            Command::Classify(c) => (Some(CommandKind::Classify), c),
            Command::Sharpness(c) => (Some(CommandKind::Sharpness), c),
            Command::AlhCheck(c) => (Some(CommandKind::AlhCheck), c),
            Command::Sweep(c) => (Some(CommandKind::Sweep), c),
        }
    }
}

fn execute(expected: Option<CommandKind>, common: &Common) -> Result<i32, String> {
    let scenario = config::load(&common.config).map_err(|e| e.to_string())?;
    if let Some(expected) = expected {
        if scenario.command != expected {
            return Err(format!(
                "config declares command `{}` but `{}` was invoked; use `run` to \
                 dispatch from the config",
                scenario.command.name(),
                expected.name()
            ));
        }
    }
    if common.jobs == Some(0) {
        return Err("--jobs must be at least 1".into());
    }
    // --seed is reserved for randomized auxiliary sampling. No current
    // command draws random numbers; solver paths never depend on it.
    let _ = common.seed;
    ops::dispatch(&scenario, &common.out, common.jobs)
}

fn main() {
    let cli = Cli::parse();
    let (expected, common) = cli.command.parts();
    let code = match execute(expected, common) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    };
    std::process::exit(code);
}
