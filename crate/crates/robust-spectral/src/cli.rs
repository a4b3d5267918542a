//! Command-line front door: single experiment runs, replication presets,
//! node scoring, and eigensolver benchmarks.
//!
//! Exit codes: 0 on success, 2 when the invocation or the config fails
//! validation (the message names every bad field), 1 on runtime failure.
//! All errors go to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use robust_spectral::eigen::bottom_nonzero_eigenpairs_with;
use robust_spectral::{
    build_knn_graph, laplacian, load_dataset, make_blobs, robustness_report, run_experiment,
    timed, write_report, write_score_csv, DatasetKind, ExperimentConfig, ExperimentReport,
    Metric, Result, SolverOptions, SolverPath,
};

#[derive(Parser)]
#[command(
    name = "robust-spectral",
    version,
    about = "Spectral clustering with noise-robust node selection",
    after_help = "Config files are flat `key = value` text; see the library docs for the schema."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file and write its report.
    Run {
        /// Experiment config file.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Print the machine-readable report instead of the human table.
        #[arg(long)]
        machine: bool,
    },
    /// Run a built-in experiment preset.
    Replicate {
        /// usps expects <data>/usps.csv (last column = digit label);
        /// mnist expects <data>/t10k-images-idx3-ubyte (+ the idx1 label
        /// file); blobs-demo is self-contained.
        #[arg(value_enum)]
        preset: Preset,
        /// Directory holding the dataset files.
        #[arg(long, default_value = "data")]
        data: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Print the machine-readable report instead of the human table.
        #[arg(long)]
        machine: bool,
    },
    /// Score every node's embedding distortion and write the score CSV.
    Score {
        /// Dataset file, or a blob spec when --kind blobs.
        dataset: String,
        #[arg(long, value_enum, default_value_t = KindArg::Csv)]
        kind: KindArg,
        #[arg(long, default_value_t = 10)]
        k_nn: usize,
        /// Embedding dimensions for the distorted-neighborhood graph.
        #[arg(long, default_value_t = 10)]
        k_clusters: usize,
        /// Distortion directions to keep; defaults to k_clusters.
        #[arg(long)]
        m_eigs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for scores.csv and eigenvalues.csv.
        #[arg(long, default_value = "runs")]
        output: PathBuf,
    },
    /// Time dense vs. iterative Laplacian eigensolves over graph sizes.
    BenchEig {
        /// Node counts to benchmark, e.g. 500 1000 2000.
        #[arg(required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        k_nn: usize,
        /// Eigenpairs to extract at every size.
        #[arg(long, default_value_t = 10)]
        m_eigs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Flags that override the corresponding config fields.
#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the report file.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    k_nn: Option<usize>,
    #[arg(long)]
    m_nodes: Option<usize>,
    #[arg(long)]
    m_eigs: Option<usize>,
}

impl Overrides {
    fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(output) = &self.output {
            config.output_dir = output.clone();
        }
        if let Some(k_nn) = self.k_nn {
            config.k_nn = k_nn;
        }
        if let Some(m_nodes) = self.m_nodes {
            config.m_nodes = m_nodes;
        }
        if let Some(m_eigs) = self.m_eigs {
            config.m_eigs = m_eigs;
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Usps,
    Mnist,
    BlobsDemo,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Csv,
    CsvLabeled,
    Idx,
    Blobs,
}

impl From<KindArg> for DatasetKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Csv => DatasetKind::Csv,
            KindArg::CsvLabeled => DatasetKind::CsvLabeled,
            KindArg::Idx => DatasetKind::Idx,
            KindArg::Blobs => DatasetKind::Blobs,
        }
    }
}

/// Report rendering target.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// Two-row comparison table for terminals.
    Human,
    /// The lossless `key = value` format (the report-file contents).
    Machine,
}

/// Render a finished report. Machine style round-trips through
/// [`ExperimentReport::parse_machine`]; human style prints a baseline/robust
/// comparison with ACC as a percentage (two decimals, `n/a` when the dataset
/// had no labels) and eigendecomposition seconds.
pub fn format_report(report: &ExperimentReport, style: Style) -> String {
    if style == Style::Machine {
        return report.to_machine_string();
    }
    let acc_cell = |a: Option<f64>| match a {
        Some(v) => format!("{:>7.2}%", 100.0 * v),
        None => format!("{:>8}", "n/a"),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}  (n = {}, d = {})  k_clusters={} k_nn={} m_nodes={} m_eigs={} seed={}",
        report.dataset,
        report.n,
        report.d,
        report.k_clusters,
        report.k_nn,
        report.m_nodes,
        report.m_eigs,
        report.seed
    );
    let _ = writeln!(out, "{:<10}  {:>8}  {:>12}", "pipeline", "ACC", "eig seconds");
    let _ = writeln!(
        out,
        "{:<10}  {}  {:>12.4}",
        "baseline",
        acc_cell(report.acc_baseline),
        report.eig_time_full
    );
    let _ = writeln!(
        out,
        "{:<10}  {}  {:>12.4}  ({:.1}x eig speedup)",
        "robust",
        acc_cell(report.acc_robust),
        report.eig_time_subset,
        report.speedup
    );
    out
}

fn preset_config(preset: Preset, data: &Path) -> Result<ExperimentConfig> {
    // Going through the config-text parser gives presets the same
    // all-issues-at-once validation (including file existence) as `run`.
    let text = match preset {
        Preset::Usps => format!(
            "dataset.kind = csv-labeled\ndataset.path = {}\n\
             k_clusters = 10\nk_nn = 10\nm_nodes = 2000\nseed = 0\n",
            data.join("usps.csv").display()
        ),
        Preset::Mnist => format!(
            "dataset.kind = idx\ndataset.path = {}\n\
             k_clusters = 10\nk_nn = 10\nm_nodes = 1500\nseed = 0\n",
            data.join("t10k-images-idx3-ubyte").display()
        ),
        Preset::BlobsDemo => "dataset.kind = blobs\n\
             dataset.path = 200x3,spread=0.08,bridge=0.1\n\
             k_clusters = 3\nk_nn = 10\nm_nodes = 200\nm_eigs = 3\nseed = 1\n"
            .to_string(),
    };
    ExperimentConfig::parse_str(&text)
}

fn execute(config: &ExperimentConfig, machine: bool) -> Result<()> {
    let report = run_experiment(config)?;
    let path = write_report(&report, &config.output_dir)?;
    let style = if machine { Style::Machine } else { Style::Human };
    print!("{}", format_report(&report, style));
    if !machine {
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn cmd_score(
    dataset: &str,
    kind: KindArg,
    k_nn: usize,
    k_clusters: usize,
    m_eigs: Option<usize>,
    seed: u64,
    output: &Path,
) -> Result<()> {
    let ps = load_dataset(kind.into(), dataset, seed)?;
    let report = robustness_report(&ps, k_nn, k_clusters, m_eigs.unwrap_or(k_clusters), seed)?;
    fs::create_dir_all(output)?;
    let scores = output.join("scores.csv");
    let eigenvalues = output.join("eigenvalues.csv");
    write_score_csv(&report, &scores, &eigenvalues)?;
    let worst: Vec<usize> = report.ranking.iter().rev().take(5).copied().collect();
    println!(
        "scored {} nodes; most distorted: {worst:?}\nwrote {} and {}",
        ps.n(),
        scores.display(),
        eigenvalues.display()
    );
    Ok(())
}

fn cmd_bench_eig(sizes: &[usize], k_nn: usize, m_eigs: usize, seed: u64) -> Result<()> {
    println!(
        "{:>8}  {:>12}  {:>14}  {:>10}",
        "n", "dense (s)", "iterative (s)", "dense/iter"
    );
    for &size in sizes {
        let n_per = (size / 5).max(1);
        let ps = make_blobs(n_per, 5, 10, 0.3, 0, seed)?;
        let graph = build_knn_graph(&ps, k_nn, Metric::Euclidean)?;
        let lap = laplacian(&graph);
        let solve = |path: SolverPath| {
            let options = SolverOptions {
                path,
                seed,
                ..SolverOptions::default()
            };
            let (pairs, secs) = timed(|| bottom_nonzero_eigenpairs_with(&lap, m_eigs, 1e-8, &options));
            pairs.map(|_| secs)
        };
        let dense = solve(SolverPath::Dense)?;
        let iterative = solve(SolverPath::Iterative)?;
        println!(
            "{:>8}  {:>12.4}  {:>14.4}  {:>10.1}",
            ps.n(),
            dense,
            iterative,
            dense / iterative
        );
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            overrides,
            machine,
        } => {
            let mut config = ExperimentConfig::from_file(&config)?;
            overrides.apply(&mut config);
            execute(&config, machine)
        }
        Command::Replicate {
            preset,
            data,
            overrides,
            machine,
        } => {
            let mut config = preset_config(preset, &data)?;
            overrides.apply(&mut config);
            execute(&config, machine)
        }
        Command::Score {
            dataset,
            kind,
            k_nn,
            k_clusters,
            m_eigs,
            seed,
            output,
        } => cmd_score(&dataset, kind, k_nn, k_clusters, m_eigs, seed, &output),
        Command::BenchEig {
            sizes,
            k_nn,
            m_eigs,
            seed,
        } => cmd_bench_eig(&sizes, k_nn, m_eigs, seed),
    }
}

/// Parse argv and run; the process exit code encodes the outcome.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
