use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Ray-based classification toolkit.
///
/// File formats (JSON; infinite distances are written as "inf"):
///
///   polytope     {"dim": N, "halfspaces": [{"normal": [..], "offset": b}, ..], "facet_ids": [..]?}
///
///   directions   {"dim": N, "phi": r|null, "seed": s|null, "directions": [[..], ..]}
///
///   fingerprint  {"x_o": [..], "T": .., "directions_ref": path|{directions}, "t": [..], "hit_facets": [[..], ..]}
///
///   dataset      header line {"M", "T", "noise", "seed", "classes"} then one {"features", "label"} per line
///
///   model        {"layer_sizes": [..], "activation": .., "weights": [[[..]]], "biases": [[..]], "seed": ..}
///
///   manifest     written next to every output file as <file>.manifest.json
///
/// Errors go to stderr as one {"error": {"category", "message", "exit_code"}} record.
#[derive(Debug, Parser)]
#[command(name = "rbc", version, about, long_about, verbatim_doc_comment)]
pub struct Cli {
    /// Worker threads for parallel subcommands; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Read every angle flag in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ray counts for a polytope class or a quantum-dot hexagon.
    Bounds(BoundsArgs),
    /// Place a direction set on the sphere.
    Place(PlaceArgs),
    /// Diameter, face inscription sizes and exterior angles of a polytope.
    Metrics(MetricsArgs),
    /// Exit distances from an observation point.
    Fingerprint(FingerprintArgs),
    /// Recover a polygon from a planar fingerprint.
    Reconstruct(ReconstructArgs),
    /// Simulation checks of the hit-count guarantees.
    Verify(VerifyArgs),
    /// Generate a quantum-dot cell dataset.
    #[command(name = "gen-qd")]
    GenQd(GenQdArgs),
    /// Train the classifier.
    Train(TrainArgs),
    /// Evaluate a trained model on a dataset.
    Eval(EvalArgs),
    /// Rerun a recorded invocation and compare its outputs byte for byte.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AngleBoundArg {
    AtMost,
    AtLeast,
}

#[derive(Debug, Args)]
pub struct ClassArgs {
    /// Diameter bound d.
    #[arg(long)]
    pub d: f64,
    /// Face inscription lower bound l.
    #[arg(long)]
    pub l: f64,
    /// Exterior angle bound α.
    #[arg(long)]
    pub alpha: f64,
    /// Whether exterior angles are bounded above or below by α.
    #[arg(long, value_enum, default_value = "at-most")]
    pub angle_bound: AngleBoundArg,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Ambient dimension N.
    #[arg(long, required_unless_present = "qd")]
    pub dim: Option<usize>,
    #[arg(long, required_unless_present = "qd")]
    pub d: Option<f64>,
    #[arg(long, required_unless_present = "qd")]
    pub l: Option<f64>,
    #[arg(long, required_unless_present = "qd")]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "at-most")]
    pub angle_bound: AngleBoundArg,

    /// Quantum-dot hexagon mode.
    #[arg(long, conflicts_with_all = ["dim", "d", "l", "alpha"])]
    pub qd: bool,
    /// Aperture (short edge length).
    #[arg(long, requires = "qd", required_unless_present_any = ["dim", "sweep"])]
    pub a: Option<f64>,
    /// Width between the short edges.
    #[arg(long, requires = "qd", default_value_t = 1.0)]
    pub w: f64,
    #[arg(long, requires = "qd")]
    pub aperture_detectable: bool,
    /// Emit one record per a/w from 0 to this value.
    #[arg(long, requires = "qd", conflicts_with = "a")]
    pub sweep: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Uniform,
    HoleSeeking,
}

#[derive(Debug, Args)]
pub struct PlaceArgs {
    #[arg(long)]
    pub dim: usize,
    /// Density radius of a greedy set.
    #[arg(long, required_unless_present = "count", conflicts_with = "count")]
    pub phi: Option<f64>,
    /// Evenly spaced planar rays instead of a greedy set.
    #[arg(long)]
    pub count: Option<usize>,
    /// Angle of the first evenly spaced ray.
    #[arg(long, default_value_t = 0.0, requires = "count")]
    pub offset: f64,
    #[arg(long, value_enum, default_value = "hole-seeking")]
    pub oracle: OracleArg,
    /// Probes per density check.
    #[arg(long, default_value_t = 100_000)]
    pub probes: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub polytope: PathBuf,
    /// Also report membership in Q(N, d, l, α); needs --l and --alpha too.
    #[arg(long, requires_all = ["l", "alpha"])]
    pub d: Option<f64>,
    #[arg(long, requires = "d")]
    pub l: Option<f64>,
    #[arg(long, requires = "d")]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "at-most")]
    pub angle_bound: AngleBoundArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FingerprintArgs {
    #[arg(long)]
    pub polytope: PathBuf,
    #[arg(long)]
    pub directions: PathBuf,
    /// Observation point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x_o: Vec<f64>,
    /// Cutoff T.
    #[arg(long)]
    pub cutoff: f64,
    /// Refer to the directions file by path instead of embedding it.
    #[arg(long)]
    pub ref_directions: bool,
    /// Also print per-facet hit counts against this threshold.
    #[arg(long)]
    pub hits: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub fingerprint: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub check: VerifyCommand,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Planar bound: every edge hit twice, some edge three times.
    Thm1(Thm1Args),
    /// Dense-set bound: every face hit N times.
    Thm2(Thm2Args),
    /// Quantum-dot ray counts.
    Qd(QdVerifyArgs),
}

#[derive(Debug, Args)]
pub struct Thm1Args {
    #[arg(long)]
    pub trials: usize,
    #[command(flatten)]
    pub class: ClassArgs,
    /// Ray count; the planar bound when absent.
    #[arg(long)]
    pub rays: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Cube,
    Prism,
    Simplex,
}

#[derive(Debug, Args)]
pub struct Thm2Args {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub trials: usize,
    #[command(flatten)]
    pub class: ClassArgs,
    /// Direction set to test; a greedy θ_min/6 set is placed when absent.
    #[arg(long)]
    pub directions: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cube,prism,simplex")]
    pub families: Vec<FamilyArg>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QdVerifyArgs {
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelsArg {
    Five,
    HexagonVsStrip,
}

#[derive(Debug, Args)]
pub struct GenQdArgs {
    #[arg(long)]
    pub n_per_class: usize,
    /// Rays per fingerprint.
    #[arg(long = "M")]
    pub m: usize,
    /// Cutoff T.
    #[arg(long = "T", default_value_t = 5.0)]
    pub cutoff: f64,
    /// Relative noise on finite distances.
    #[arg(long, default_value_t = 0.03)]
    pub noise: f64,
    #[arg(long)]
    pub aperture_detectable: bool,
    #[arg(long, value_enum, default_value = "five")]
    pub labels: LabelsArg,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainOptions {
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
    /// Share of each class used for training.
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, value_delimiter = ',', default_value = "128,64,32")]
    pub hidden: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub options: TrainOptions,
    /// Train and test this many times on fresh splits and report mean and spread.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long)]
    pub seed: u64,
    /// Model output (single runs only).
    #[arg(long, conflicts_with = "repeat")]
    pub model: Option<PathBuf>,
    /// Held-out split as a dataset file (single runs only).
    #[arg(long, conflicts_with = "repeat")]
    pub test_out: Option<PathBuf>,
    /// Final report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
