mod commands;
mod plot;
mod records;

use std::path::PathBuf;
use std::process::ExitCode;

use bifront::frontier::PipelineConfig;
use bifront::generate::DEFAULT_SEED;
use bifront::mppf::FusionConfig;
use clap::{Parser, Subcommand};

use commands::*;

/// Constrained bi-objective convex instances, reference frontiers, prompts,
/// fusion and evaluation.
#[derive(Parser)]
#[command(name = "bifront", version)]
struct Cli {
    /// Worker threads; output order never depends on it.
    #[arg(long, global = true, env = "BIFRONT_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instances as dataset records.
    Generate {
        /// Family name, comma-separated list, or `all`.
        #[arg(long, default_value = "all")]
        family: String,
        /// Dimension `N` or inclusive range `A..B`.
        #[arg(long, default_value = "10")]
        n: String,
        /// Instances per family and dimension.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Attach anchors and an ε-constraint reference frontier to each record.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        num_eps: usize,
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Feasibility tolerance of the post-processing filter.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 1e-4)]
        obj_tol: f64,
    },
    /// Score predictions against reference frontiers.
    Eval {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long, default_value_t = 5e-5)]
        tol: f64,
        /// JSON report path.
        #[arg(long)]
        out: PathBuf,
        /// Directory for one SVG scatter plot per instance.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Pool several prediction files (one pass each) into K-point frontiers.
    Fuse {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        passes: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, default_value_t = 5e-5)]
        tol: f64,
        #[arg(long, default_value_t = 1e-4)]
        obj_tol: f64,
        /// Resample once over the union of the needed fronts.
        #[arg(long)]
        union: bool,
    },
    /// Render dataset records as prompt/answer text.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        k: usize,
    },
    /// Parse answer text (`text` or `assistant` field) into prediction records.
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted-sum frontiers on a uniform weight grid, as prediction records.
    Baseline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        k: usize,
    },
}

fn run(cli: Cli) -> anyhow::Result<usize> {
    if let Some(w) = cli.workers {
        anyhow::ensure!(w > 0, "worker count must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    match cli.command {
        Command::Generate { family, n, count, seed, out } => cmd_generate(&GenerateArgs {
            families: parse_families(&family)?,
            dims: parse_dims(&n)?,
            count,
            seed,
            out: &out,
        }),
        Command::Solve { input, out, num_eps, k, tol, obj_tol } => {
            let config = PipelineConfig { num_eps, k, obj_tol, feas_tol: tol, ..PipelineConfig::default() };
            cmd_solve(&input, &out, &config)
        }
        Command::Eval { reference, predictions, tol, out, plot } => cmd_eval(&EvalArgs {
            reference: &reference,
            predictions: &predictions,
            out: &out,
            tol,
            plot: plot.as_deref(),
        }),
        Command::Fuse { dataset, passes, out, k, tol, obj_tol, union } => cmd_fuse(&FuseArgs {
            dataset: &dataset,
            passes: passes.iter().map(PathBuf::as_path).collect(),
            out: &out,
            config: FusionConfig { k, tol, obj_tol, union_selection: union, ..FusionConfig::default() },
        }),
        Command::Encode { input, out, k } => cmd_encode(&input, &out, k),
        Command::Decode { input, out } => cmd_decode(&input, &out),
        Command::Baseline { input, out, k } => cmd_baseline(&input, &out, k),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(errors) => {
            eprintln!("{errors} error record(s) emitted");
            ExitCode::FAILURE
        }
        Err(e) => {
            let rec = records::ErrorRecord::new(None, None, format!("{e:#}"));
            eprintln!("{}", serde_json::to_string(&rec).unwrap_or_else(|_| format!("{e:#}")));
            ExitCode::from(2)
        }
    }
}
