use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hmvi_core::imputer::{Ablation, RefreshPolicy};
use serde::{Deserialize, Serialize};

/// Missing-value imputation for mixed nominal, ordinal and numerical tables.
///
/// Every run writes `manifest.json` into its output directory; `hmvi replay`
/// reruns it and reproduces the output files byte-for-byte.
#[derive(Debug, Parser)]
#[command(name = "hmvi", version)]
pub struct Cli {
    /// More log output on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Fill the missing cells of a table.
    Impute(ImputeArgs),
    /// Remove a fraction of the cells of a complete table at random.
    Inject(InjectArgs),
    /// Run the corrupt / impute / score grid on a complete labeled table.
    Evaluate(EvaluateArgs),
    /// Dump the attribute weights and value-pair dissimilarity tables.
    Inspect(InspectArgs),
    /// Write a seeded synthetic labeled table and its schema.
    Generate(GenerateArgs),
    /// Rerun the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Data file (CSV).
    #[arg(long)]
    pub input: PathBuf,
    /// Schema file: one `name:nominal`, `name:numerical` or
    /// `name:ordinal:low<mid<high` line per column.
    #[arg(long)]
    pub schema: PathBuf,
    /// Cell text marking a missing value.
    #[arg(long, default_value = "?")]
    pub missing_token: String,
    /// The data file has no header line.
    #[arg(long)]
    pub no_header: bool,
    /// Class label column, kept out of imputation and clustering.
    #[arg(long)]
    pub labels: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputeMethod {
    Hmvi,
    Mms,
    Knnmi,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HmviArgs {
    /// Number of clusters.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Random seed; drawn at random and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Component to switch off: full, no_natural_neighbors or no_preclustering.
    #[arg(long, default_value = "full", value_parser = parse_ablation)]
    pub ablation: Ablation,
    /// Re-cluster for every object (full) or only update it (incremental).
    #[arg(long, default_value = "full", value_parser = parse_refresh)]
    pub refresh: RefreshPolicy,
    /// Neighbors used by the knnmi baseline.
    #[arg(long, default_value_t = 5)]
    pub knn_k: usize,
    /// Iteration cap for clustering.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ImputeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "hmvi")]
    pub method: ImputeMethod,
    #[command(flatten)]
    pub hmvi: HmviArgs,
    /// Output directory: complete.csv, clusters.csv (hmvi), report.txt.
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
    /// Also write weights.csv and the pair tables into this directory.
    #[arg(long)]
    #[serde(skip)]
    pub dump_model: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InjectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Fraction of cells to remove, strictly between 0 and 1.
    #[arg(long)]
    pub rate: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory: corrupted.csv, mask.csv.
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated: hmvi, hmvi-0, hmvi-1, mms, knnmi.
    #[arg(long, value_delimiter = ',', default_value = "hmvi,mms,knnmi")]
    pub methods: Vec<String>,
    /// Comma-separated missing rates.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
    pub rates: Vec<f64>,
    /// Repeats per rate.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[command(flatten)]
    pub hmvi: HmviArgs,
    /// k-prototypes categorical weight (default: half the mean numeric
    /// standard deviation).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Add a wall_ms column to grid.csv. Timings differ between runs, so
    /// reruns no longer match byte-for-byte.
    #[arg(long)]
    pub timings: bool,
    /// Output directory: grid.csv, means.csv.
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InspectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output directory: weights.csv, pairs_<column>.csv.
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// mixed, ds, ta or bc.
    #[arg(long, default_value = "mixed")]
    pub shape: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory: data.csv (with a `class` column), data.schema.
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// manifest.json of an earlier run.
    pub manifest: PathBuf,
    /// Where to write the reproduced outputs.
    #[arg(long)]
    pub output: PathBuf,
}

fn parse_ablation(s: &str) -> Result<Ablation, String> {
    match s {
        "full" => Ok(Ablation::Full),
        "no_natural_neighbors" => Ok(Ablation::NoNaturalNeighbors),
        "no_preclustering" => Ok(Ablation::NoPreclustering),
        _ => Err("expected full, no_natural_neighbors or no_preclustering".into()),
    }
}

fn parse_refresh(s: &str) -> Result<RefreshPolicy, String> {
    match s {
        "full" => Ok(RefreshPolicy::Full),
        "incremental" => Ok(RefreshPolicy::Incremental),
        _ => Err("expected full or incremental".into()),
    }
}
