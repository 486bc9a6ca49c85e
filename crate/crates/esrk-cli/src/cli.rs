use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "esrk",
    about = "Energy-superconvergent explicit Runge-Kutta toolkit",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect the method catalog.
    Methods {
        #[command(subcommand)]
        action: MethodsAction,
    },
    /// Re-derive energy-superconvergent coefficients for a stage count
    /// and (even) solution order.
    Derive {
        /// Stage count s, with p < s <= p + 3.
        s: usize,
        /// Solution order p (even).
        p: usize,
    },
    /// Grid-refinement study writing one CSV row per resolution.
    Convergence(ExperimentArgs),
    /// Energy time history of a single run, with a log-log decay fit.
    EnergyHistory(ExperimentArgs),
    /// Boundary of the stability region |G(z)| = 1 as a CSV point list.
    StabilityRegion {
        /// Catalog method name, e.g. "RK(5,4,7)".
        #[arg(long)]
        method: Option<String>,
        /// Window as re_min,re_max,im_min,im_max.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        window: Option<Vec<f64>>,
        /// Samples per axis (>= 16).
        #[arg(long)]
        resolution: Option<usize>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<String>,
        /// key=value defaults file; flags win.
        #[arg(long)]
        config: Option<String>,
    },
    /// One benchmark run with a summary on stdout.
    Run {
        /// Problem: oscillator, peridynamics, or maxwell.
        #[arg(id = "problem_name", value_name = "PROBLEM")]
        problem: String,
        #[command(flatten)]
        args: ExperimentArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum MethodsAction {
    /// Table of all catalog methods.
    List,
    /// Coefficients and energy profile of one method.
    Show { name: String },
}

/// Shared experiment flags; unset values fall back to the config file and
/// then to per-problem defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct ExperimentArgs {
    /// Problem: oscillator, peridynamics, or maxwell.
    #[arg(long)]
    pub problem: Option<String>,
    /// Catalog method name, or "fdtd" for the maxwell baseline.
    #[arg(long)]
    pub method: Option<String>,
    /// Time-step counts (oscillator); comma-separated for studies.
    #[arg(long, value_delimiter = ',')]
    pub nt: Option<Vec<usize>>,
    /// Cell counts (peridynamics, maxwell); comma-separated for studies.
    #[arg(long, value_delimiter = ',')]
    pub nx: Option<Vec<usize>>,
    /// Courant number for maxwell runs (default: the method's stability
    /// limit, or 1 for the fdtd baseline).
    #[arg(long)]
    pub courant: Option<f64>,
    /// Final time (default: the problem's benchmark horizon).
    #[arg(long = "T")]
    pub t_final: Option<f64>,
    /// Fixed iteration count for maxwell energy histories.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Record the energy every k steps.
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<String>,
    /// key=value defaults file; flags win.
    #[arg(long)]
    pub config: Option<String>,
}
