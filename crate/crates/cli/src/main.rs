//! `mpeval`: minimal-pair evaluation of articulatory feature trajectories.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpeval_core::align::CostMetric;
use mpeval_core::minpair::PositionClass;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "mpeval",
    version,
    about = "Minimal-pair evaluation of articulatory feature trajectories"
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine minimal-pair sets from a pronunciation dictionary (JSON lines).
    FindPairs(FindPairsArgs),
    /// Extract one articulatory target per sample (JSON lines).
    ExtractTargets(ExtractTargetsArgs),
    /// Leave-one-out linear SVM accuracy of a target table.
    Classify(ClassifyArgs),
    /// Voicing score of a target table.
    VoicingScore(VoicingArgs),
    /// Cross-speaker label similarity matrix of DTW-aligned trajectories.
    SimilarityMatrix(SimilarityArgs),
    /// Self-training and consistency losses, optionally with gradients.
    ConsistencyLoss(ConsistencyArgs),
    /// Write a synthetic corpus with known structure.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassArg {
    Vowel,
    Consonant,
    Any,
}

impl From<ClassArg> for PositionClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Vowel => PositionClass::Vowel,
            ClassArg::Consonant => PositionClass::Consonant,
            ClassArg::Any => PositionClass::Any,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    CosineDistance,
}

impl From<MetricArg> for CostMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => CostMetric::Euclidean,
            MetricArg::CosineDistance => CostMetric::CosineDistance,
        }
    }
}

#[derive(Debug, Args)]
struct FindPairsArgs {
    /// MFA-style pronunciation dictionary.
    #[arg(long)]
    dict: PathBuf,
    /// JSON object mapping each phone to "vowel" or "consonant".
    #[arg(long)]
    inventory: Option<PathBuf>,
    #[arg(long = "class", value_enum, default_value = "any")]
    class_filter: ClassArg,
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    /// Keep a seeded random sample of at most this many sets.
    #[arg(long)]
    max_sets: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Options shared by commands that read a manifest.
#[derive(Debug, Args)]
struct PipelineArgs {
    /// JSON-lines sample manifest.
    #[arg(long)]
    manifest: PathBuf,
    /// Directory trajectory paths are relative to (default: the manifest's).
    #[arg(long)]
    base_dir: Option<PathBuf>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long)]
    no_znorm: bool,
    #[arg(long)]
    no_filter: bool,
}

#[derive(Debug, Args)]
struct ExtractTargetsArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Randomly project every trajectory to this many channels first.
    #[arg(long, requires = "project_seed")]
    project_dim: Option<usize>,
    #[arg(long, requires = "project_dim")]
    project_seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Target table (JSON lines).
    #[arg(long)]
    targets: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    svm_c: Option<f64>,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Permute labels within each set before classifying (chance baseline).
    #[arg(long)]
    shuffle_labels: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VoicingArgs {
    #[arg(long)]
    targets: PathBuf,
    /// JSON voicing spec: anchor_pairs, contrast_labels, optional set_id.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimilarityArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Only use samples of this set.
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConsistencyArgs {
    /// Model predictions on the utterance (AFT1, N frames).
    #[arg(long)]
    y_hat: PathBuf,
    /// Frozen-model predictions on the utterance (AFT1, N frames).
    #[arg(long)]
    y_frozen: PathBuf,
    /// Model predictions on the paired utterance (AFT1, M frames).
    #[arg(long)]
    y_hat_star: PathBuf,
    /// JSON sidecar with phi, c and alpha.
    #[arg(long, conflicts_with_all = ["features", "features_star"])]
    sidecar: Option<PathBuf>,
    /// Input features of the utterance, aligned to obtain phi and c.
    #[arg(long, requires = "features_star")]
    features: Option<PathBuf>,
    #[arg(long, requires = "features")]
    features_star: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Replace negative similarity weights with 0.
    #[arg(long)]
    clamp_weights: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write gradient matrices as AFT1 files into this directory.
    #[arg(long)]
    grad_out: Option<PathBuf>,
    /// Write the batch's phi, c and alpha as a JSON sidecar.
    #[arg(long)]
    sidecar_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SynthKind {
    /// V-C-V articulatory-like trajectories, several repetitions per class.
    Articulatory {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        speakers: usize,
        #[arg(long, default_value_t = 5)]
        classes: usize,
        #[arg(long, default_value_t = 4)]
        repetitions: usize,
        #[arg(long, default_value_t = 100)]
        frames: usize,
        #[arg(long, default_value_t = 8)]
        channels: usize,
    },
    /// High-dimensional speech-feature-like trajectories, one per label and speaker.
    Features {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        speakers: usize,
        #[arg(long, default_value_t = 1024)]
        dim: usize,
        #[arg(long, default_value_t = 60)]
        frames: usize,
        #[arg(long, value_delimiter = ',', default_value = "b,p,f,t,k,s")]
        labels: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::FindPairs(a) => commands::find_pairs(a),
        Command::ExtractTargets(a) => commands::extract_targets(a),
        Command::Classify(a) => commands::classify(a),
        Command::VoicingScore(a) => commands::voicing(a),
        Command::SimilarityMatrix(a) => commands::similarity(a),
        Command::ConsistencyLoss(a) => commands::consistency(a),
        Command::Synth { kind } => commands::synth(kind),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(cli))
        .unwrap_or_else(|_| Err(CliError::internal("internal invariant violated (panic)")));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.category.exit_code() as u8)
        }
    }
}
