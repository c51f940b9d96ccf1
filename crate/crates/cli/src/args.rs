use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use theta_opers::verify::Suite;

/// Defaults for every tunable; flags override them.
pub mod defaults {
    pub const THETA_TOL: f64 = theta_opers::theta::DEFAULT_THETA_TOL;
    pub const QUADRATURE_TOL: f64 = theta_opers::curve::DEFAULT_QUADRATURE_TOL;
    pub const COLLISION_TOL: f64 = 1e-6;
    pub const TRIVIAL_TOL: f64 = 1e-6;
    pub const ZERO_FLOOR: f64 = theta_opers::theta::DEFAULT_ZERO_FLOOR;
    pub const SERIES_ORDER: usize = 16;
    pub const PROBE_SAMPLES: usize = 200;
    pub const VERIFY_CASES: usize = 20;
    pub const SEED: u64 = 0;
}

#[derive(Debug, Parser)]
#[command(name = "theta-opers", version, about = "Theta functions, kernels and oper jets on hyperelliptic curves")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Curve spec file: {"f": [c0, c1, ...]}
    #[arg(long, global = true)]
    pub curve: Option<PathBuf>,
    /// Truncation tolerance of theta series
    #[arg(long, alias = "theta-tol", global = true, default_value_t = defaults::THETA_TOL)]
    pub tol: f64,
    /// Relative tolerance of the period quadrature
    #[arg(long, global = true, default_value_t = defaults::QUADRATURE_TOL)]
    pub quadrature_tol: f64,
    /// |theta| below this fraction of its largest term counts as a zero
    #[arg(long, global = true, default_value_t = defaults::ZERO_FLOOR)]
    pub zero_floor: f64,
    #[arg(long, global = true, default_value_t = defaults::SEED)]
    pub seed: u64,
    /// Probe samples, or random cases for sampled verify suites
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Series order of local expansions and jets
    #[arg(long, global = true, default_value_t = defaults::SERIES_ORDER)]
    pub order: usize,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch points, period matrices and the Riemann matrix of a curve
    Periods,
    /// Run an identity suite and report each check
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// Sample the Jacobian and look for colliding Klein coordinates
    Probe(ProbeArgs),
    /// Evaluate a single function
    Eval {
        #[command(subcommand)]
        what: Eval,
    },
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, default_value_t = defaults::COLLISION_TOL)]
    pub collision_tol: f64,
    #[arg(long, default_value_t = defaults::TRIVIAL_TOL)]
    pub trivial_tol: f64,
    /// Extra Jacobian points appended after the samples (JSON complex vectors)
    #[arg(long = "point")]
    pub points: Vec<String>,
    /// Also write the CSV table here
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// First point: x as [re, im], or {"x": [re, im], "sheet": -1}
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Chart at x: dx, linear:<complex>, abelian:<index>
    #[arg(long, default_value = "dx")]
    pub chart_x: String,
    #[arg(long, default_value = "dx")]
    pub chart_y: String,
}

#[derive(Debug, Subcommand)]
pub enum Eval {
    /// Riemann theta with characteristic and derivatives
    Theta {
        /// Argument z (JSON complex vector); zero by default
        #[arg(long)]
        z: Option<String>,
        /// Riemann matrix (JSON, row-major); taken from --curve when absent
        #[arg(long)]
        omega: Option<String>,
        /// Characteristic bits [[a_1, ...], [b_1, ...]]
        #[arg(long)]
        characteristic: Option<String>,
        /// Derivative counts per coordinate, total at most 3
        #[arg(long)]
        derivative: Option<String>,
    },
    /// Szego kernel of the line bundle e
    Szego {
        #[arg(long)]
        e: String,
        #[command(flatten)]
        points: PointArgs,
    },
    /// Klein kernel of split data; a single --e means (e, -e). Without --x/--y, the Klein coordinates of e
    Klein {
        #[arg(long, required = true)]
        e: Vec<String>,
        #[arg(long, requires = "y")]
        x: Option<String>,
        #[arg(long, requires = "x")]
        y: Option<String>,
        #[arg(long, default_value = "dx")]
        chart_x: String,
        #[arg(long, default_value = "dx")]
        chart_y: String,
    },
    /// Wirtinger projective connection of (e, -e) at a point
    Wirtinger {
        #[arg(long)]
        e: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "dx")]
        chart: String,
    },
    /// Bergman kernel
    Bergman {
        #[command(flatten)]
        points: PointArgs,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}
