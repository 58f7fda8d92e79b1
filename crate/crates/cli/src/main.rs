//! `muxkit` — emit the data behind the mux analyses as CSV/JSON.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "muxkit", version, about = "Photonic switch-network and multiplexing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form curves: yields, mux success, source counts.
    Analyze(AnalyzeArgs),
    /// Routable-pattern searches for generator front ends.
    Search(SearchArgs),
    /// Monte-Carlo yield of a two-layer grid mux.
    Gridmux(GridmuxArgs),
    /// Temporal muxing: rastering, de Bruijn networks, permutations.
    Temporal(TemporalArgs),
    /// Build, inspect and check GMZI devices.
    Gmzi(GmziArgs),
    /// Export feed-forward truth tables.
    Logic(LogicArgs),
    /// Run the reference checks; exit code 0 iff all pass.
    Verify(VerifyArgs),
    /// Build a switch network and report its cost metrics.
    Net(NetArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    /// Maximum of the multi-generator yield over λ.
    YieldMax,
    /// Multi-generator yield against λ, with and without sharing.
    Yield,
    /// Naive and optimal group success against p.
    Pmux,
    /// Sources needed by naive and optimal muxing for a target.
    SourcesRatio,
    /// Four-photon Bell-pair front ends against p.
    Bell,
    /// Generator success against mode count.
    Bsg,
    /// Expected raster groups per period against N.
    Raster,
}

#[derive(Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub curve: Curve,
    /// Photons per generator.
    #[arg(long, default_value_t = 4)]
    pub m: u64,
    /// Generators.
    #[arg(long, default_value_t = 1)]
    pub g: u64,
    /// Do not pool photons between generators.
    #[arg(long)]
    pub no_sharing: bool,
    /// Number of sources.
    #[arg(long, default_value_t = 48)]
    pub n: u64,
    /// Source probability grid `lo:hi:step` or a comma list.
    #[arg(long, default_value = "0.01:0.2:0.01")]
    pub p_grid: String,
    /// Mean photon number grid.
    #[arg(long, default_value = "0.5:30:0.5")]
    pub lambda_grid: String,
    /// Source count grid (bsg, raster).
    #[arg(long, default_value = "8:128:8")]
    pub n_grid: String,
    /// Target success probability (sources-ratio).
    #[arg(long, default_value_t = 0.99)]
    pub target: f64,
    /// Source probability for single-p curves.
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Circuit {
    /// Single MZI layer ahead of an 8-mode Bell generator.
    Bsg8,
    /// Single MZI layer ahead of a 12-mode GHZ generator.
    Ghz12,
    /// Dual-rail rearrangement fractions and binning.
    Rails,
    /// Two-layer four-photon network on 16 modes.
    FourPhoton,
    /// GMZI + MZI six-photon network on 18 modes.
    SixPhoton,
}

#[derive(Args, Serialize)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub circuit: Circuit,
    /// Write per-pattern results as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct GridmuxArgs {
    /// JSON grid configuration; defaults to the 16×16 reference layout.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Column GMZI group, e.g. `2x2x2x2` or `16`.
    #[arg(long, default_value = "2x2x2x2")]
    pub column_type: String,
    #[arg(long, default_value = "0.01:0.2:0.01")]
    pub p_grid: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Print the default configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    /// Raster strategies: closed forms and Monte Carlo against N.
    Raster,
    /// Regular against enhanced rastering.
    Enhanced,
    /// de Bruijn mux success, single configuration and Tetris.
    Debruijn,
    /// Spatio-temporal group probabilities.
    Spatiotemporal,
    /// A temporal permutation schedule and its replay.
    Permutation,
    /// A (reduced) de Bruijn sequence.
    Sequence,
}

#[derive(Args, Serialize)]
pub struct TemporalArgs {
    #[arg(long, value_enum)]
    pub study: Study,
    #[arg(long, default_value = "8:128:8")]
    pub n_grid: String,
    #[arg(long, default_value = "0.05:0.5:0.05")]
    pub p_grid: String,
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Raster strategy: i, ii, iii, iv.
    #[arg(long, default_value = "i")]
    pub strategy: String,
    /// Spatial modes (de Bruijn, spatio-temporal, sequence alphabet).
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    /// Time bins (de Bruijn, spatio-temporal, sequence word length).
    #[arg(long, default_value_t = 4)]
    pub bins: usize,
    #[arg(long)]
    pub reduced: bool,
    /// Photons per group (spatio-temporal).
    #[arg(long, default_value_t = 4)]
    pub group: usize,
    #[arg(long, default_value_t = 2)]
    pub max_cross: usize,
    #[arg(long, default_value_t = 2)]
    pub max_delay: usize,
    #[arg(long, default_value_t = 4)]
    pub max_groups: usize,
    /// Permutation as a comma list, e.g. `2,0,1`.
    #[arg(long)]
    pub perm: Option<String>,
    /// Occupied inputs for sort-to-top, e.g. `01101`.
    #[arg(long)]
    pub occupied: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 4)]
    pub periods: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct GmziArgs {
    /// Group, e.g. `4x2`, `[2,2,2]` or `8`.
    #[arg(long)]
    pub spec: Option<String>,
    /// List the GMZI types of this size.
    #[arg(long)]
    pub classify: Option<usize>,
    /// Print the phase-offset and ternary orthogonal-set tables.
    #[arg(long)]
    pub tables: bool,
    /// Check every setting against its permutation.
    #[arg(long)]
    pub check: bool,
    /// Write the device as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct LogicArgs {
    /// Input ports.
    #[arg(long, default_value_t = 8)]
    pub width: usize,
    /// Photons to select.
    #[arg(long, default_value_t = 4)]
    pub photons: usize,
    /// Routing table for a generator front end instead (bsg8, ghz12).
    #[arg(long, value_enum)]
    pub circuit: Option<Circuit>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    /// 10⁴ instead of 10⁵ Monte-Carlo trials.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = muxkit::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Run only these criteria (comma list of ids).
    #[arg(long)]
    pub only: Option<String>,
    /// Also print elapsed seconds per criterion.
    #[arg(long)]
    pub timings: bool,
    /// Write the numeric values of the run as text.
    #[arg(long)]
    pub numeric: Option<PathBuf>,
    /// Write the full results as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct NetArgs {
    /// log-tree, chain, delay-network, storage-loop, spanke,
    /// spanke-reduced, concatenated-gmzi.
    #[arg(long)]
    pub topology: String,
    /// Inputs.
    #[arg(long)]
    pub size: usize,
    /// Switch size, or outputs for the N-to-M families.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Write the component graph as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    muxkit::simkit::configure_threads_from_env();
    let r = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Search(a) => commands::search(&a),
        Command::Gridmux(a) => commands::gridmux(&a),
        Command::Temporal(a) => commands::temporal(&a),
        Command::Gmzi(a) => commands::gmzi(&a),
        Command::Logic(a) => commands::logic(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Net(a) => commands::net(&a),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
