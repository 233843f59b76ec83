//! `khess`: thresholds, phase portraits, bifurcation counts, radial profiles,
//! shooting and Pohozaev audits for radial complex k-Hessian problems.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use khess_core::phase::IntegratorConfig;

#[derive(Parser, Debug)]
#[command(name = "khess", version, about)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = output::OUT_DIR_ENV, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SpecArgs {
    /// Complex dimension.
    #[arg(long)]
    pub n: u32,
    /// Hessian order, 1 <= k <= n.
    #[arg(long)]
    pub k: u32,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct IntegratorArgs {
    /// Relative step tolerance of the phase-plane integrator.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Radius of the ball around the equilibrium that ends an integration.
    #[arg(long)]
    pub eq_radius: Option<f64>,
    /// Size of the seed near the origin.
    #[arg(long)]
    pub seed_delta: Option<f64>,
}

impl IntegratorArgs {
    pub fn apply(&self, mut base: IntegratorConfig) -> IntegratorConfig {
        if let Some(x) = self.tol {
            base.rel_tol = x;
        }
        if let Some(x) = self.t_max {
            base.t_max = x;
        }
        if let Some(x) = self.eq_radius {
            base.eq_radius = x;
        }
        if let Some(x) = self.seed_delta {
            base.seed_delta = x;
        }
        base
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical exponent, thresholds and equilibrium classification.
    Exponents {
        #[command(flatten)]
        spec: SpecArgs,
        /// Power exponent to test for nonexistence.
        #[arg(long)]
        p: Option<f64>,
        /// Even real dimension for the Moser-Trudinger constants.
        #[arg(long)]
        d: Option<u32>,
    },
    /// Integrate the phase-plane trajectory; writes CSV and SVG.
    Phase {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        integ: IntegratorArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Count radial solutions over a grid of parameters `a`.
    Bifurcation {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        integ: IntegratorArgs,
        /// Largest `a`; defaults to 1.2 times the basic nonexistence threshold.
        #[arg(long)]
        a_max: Option<f64>,
        /// Smallest `a`; defaults to `a_max / a_points`.
        #[arg(long)]
        a_min: Option<f64>,
        #[arg(long, default_value_t = 240)]
        a_points: usize,
    },
    /// Sample or reconstruct a radial profile and audit it.
    Profile {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        integ: IntegratorArgs,
        /// Reconstruct the solution whose boundary sits at phase value `v`.
        #[arg(long, conflicts_with = "explicit", required_unless_present = "explicit")]
        at_v: Option<f64>,
        /// Sample the explicit Monge-Ampere solution with this `eps` (k = n).
        #[arg(long)]
        explicit: Option<f64>,
        /// Number of grid points.
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        /// Tolerance of the residual checks.
        #[arg(long = "check-tol", default_value_t = 1e-6)]
        check_tol: f64,
    },
    /// Shoot the power problem from the centre.
    Shoot {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        p: f64,
        /// Depth `-u(0)`.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1e6)]
        s_cap: f64,
        /// Sweep `p` up to this value instead of a single shot.
        #[arg(long)]
        sweep_to: Option<f64>,
        #[arg(long, default_value_t = 12)]
        sweep_points: usize,
        #[arg(long = "check-tol", default_value_t = 1e-5)]
        check_tol: f64,
    },
    /// Audit a profile CSV against the Pohozaev identity.
    Audit {
        #[command(flatten)]
        spec: SpecArgs,
        /// Profile CSV with columns s,u,u_s.
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, conflicts_with = "exponential", required_unless_present = "exponential")]
        power: Option<f64>,
        /// Parameter `a` of the nonlocal exponential nonlinearity.
        #[arg(long)]
        exponential: Option<f64>,
        #[arg(long = "check-tol", default_value_t = 1e-6)]
        check_tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = cli.out_dir;
    let result = match cli.command {
        Command::Exponents { spec, p, d } => commands::exponents(&dir, spec, p, d),
        Command::Phase { spec, integ, csv, svg } => commands::phase(&dir, spec, integ, csv, svg),
        Command::Bifurcation { spec, integ, a_max, a_min, a_points } => {
            commands::bifurcation(&dir, spec, integ, a_min, a_max, a_points)
        }
        Command::Profile { spec, integ, at_v, explicit, grid, check_tol } => {
            commands::profile(&dir, spec, integ, at_v, explicit, grid, check_tol)
        }
        Command::Shoot { spec, p, m, s_cap, sweep_to, sweep_points, check_tol } => {
            commands::shoot(&dir, spec, p, m, s_cap, sweep_to, sweep_points, check_tol)
        }
        Command::Audit { spec, profile, power, exponential, check_tol } => {
            commands::audit(&dir, spec, &profile, power, exponential, check_tol)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
