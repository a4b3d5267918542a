//! Config-driven experiments: run the plain and the robust pipeline on one
//! dataset under the same seed, collect accuracies and stage timings, and
//! serialize the result as a machine-readable report.
//!
//! The configuration is a flat `key = value` text file (`#` starts a
//! comment):
//!
//! ```text
//! dataset.kind = blobs            # csv | csv-labeled | idx | blobs
//! dataset.path = 200x3,spread=0.08,bridge=0.1
//! k_clusters   = 3
//! k_nn         = 10               # optional, default 10
//! m_nodes      = 200
//! m_eigs       = 3                # optional, default k_clusters
//! seed         = 1                # optional, default 0
//! output.dir   = runs             # optional, default "runs"
//! ```
//!
//! `dataset.path` is a file path for `csv`/`csv-labeled`/`idx`. For
//! `csv-labeled` the last column holds the labels. For `idx` the file is an
//! idx3 image file; a label file is picked up automatically when replacing
//! `images`→`labels` and `idx3`→`idx1` in the file name yields an existing
//! file. For `blobs` the "path" is a generator spec
//! `<n_per>x<k>[,d=<dims>][,spread=<std>][,noise=<extra dims>][,bridge=<frac>]`
//! (defaults `d=2, spread=0.08, noise=0`); `bridge` displaces that fraction
//! of points onto class-centroid midpoints, planting noisy wiring (see
//! [`crate::dataset::add_bridge_noise`]).
//!
//! Validation is all-at-once: every violated field is reported, not just the
//! first.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::clustering::spectral_clustering_timed;
use crate::dataset::{add_bridge_noise, load_csv, load_idx, make_blobs, PointSet};
use crate::eigen::SolverOptions;
use crate::error::{Error, Result};
use crate::metrics::acc;
use crate::pipeline::{robust_spectral_clustering_with, RobustParams};

/// Where an experiment's points come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// Numeric CSV, no labels.
    Csv,
    /// Numeric CSV whose last column is the label.
    CsvLabeled,
    /// IDX image file (labels picked up by file-name convention).
    Idx,
    /// Synthetic blob generator spec.
    Blobs,
}

impl DatasetKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "csv-labeled" => Some(Self::CsvLabeled),
            "idx" => Some(Self::Idx),
            "blobs" => Some(Self::Blobs),
            _ => None,
        }
    }

    /// The config-file spelling.
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::CsvLabeled => "csv-labeled",
            Self::Idx => "idx",
            Self::Blobs => "blobs",
        }
    }
}

/// A validated experiment configuration (see the module docs for the file
/// schema).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset_kind: DatasetKind,
    pub dataset_path: String,
    pub k_clusters: usize,
    pub k_nn: usize,
    pub m_nodes: usize,
    pub m_eigs: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

const CONFIG_KEYS: [&str; 8] = [
    "dataset.path",
    "dataset.kind",
    "k_clusters",
    "k_nn",
    "m_nodes",
    "m_eigs",
    "seed",
    "output.dir",
];

fn parse_field<T: std::str::FromStr>(
    raw: Option<&String>,
    key: &str,
    what: &str,
    issues: &mut Vec<String>,
) -> Option<T> {
    let raw = raw?;
    match raw.parse::<T>() {
        Ok(v) => Some(v),
        Err(_) => {
            issues.push(format!("{key}: '{raw}' is not {what}"));
            None
        }
    }
}

impl ExperimentConfig {
    /// Read and validate a config file. A missing or unreadable file is a
    /// validation failure (it names the path), not a runtime error.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            issues: vec![format!("config file {}: {e}", path.display())],
        })?;
        Self::parse_str(&text)
    }

    /// Parse and validate config text, collecting every problem.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut issues: Vec<String> = Vec::new();
        let mut fields: BTreeMap<&str, String> = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                issues.push(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                ));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(key) = CONFIG_KEYS.iter().find(|&&k| k == key) else {
                issues.push(format!("{key}: unknown key"));
                continue;
            };
            if fields.insert(key, value.to_string()).is_some() {
                issues.push(format!("{key}: duplicate key"));
            }
        }

        let kind = match fields.get("dataset.kind") {
            None => {
                issues.push("dataset.kind: missing (required)".to_string());
                None
            }
            Some(v) => {
                let parsed = DatasetKind::parse(v);
                if parsed.is_none() {
                    issues.push(format!(
                        "dataset.kind: unknown value '{v}' (expected csv | csv-labeled | idx | blobs)"
                    ));
                }
                parsed
            }
        };

        let path = match fields.get("dataset.path") {
            None => {
                issues.push("dataset.path: missing (required)".to_string());
                None
            }
            Some(v) => Some(v.clone()),
        };
        if let (Some(kind), Some(path)) = (kind, path.as_deref()) {
            match kind {
                DatasetKind::Blobs => {
                    if let Err(msg) = BlobSpec::parse(path) {
                        issues.push(format!("dataset.path: {msg}"));
                    }
                }
                _ => {
                    if !Path::new(path).is_file() {
                        issues.push(format!("dataset.path: no such file '{path}'"));
                    }
                }
            }
        }

        let k_clusters: Option<usize> = match fields.get("k_clusters") {
            None => {
                issues.push("k_clusters: missing (required)".to_string());
                None
            }
            raw => parse_field(raw, "k_clusters", "a positive integer", &mut issues),
        };
        let m_nodes: Option<usize> = match fields.get("m_nodes") {
            None => {
                issues.push("m_nodes: missing (required)".to_string());
                None
            }
            raw => parse_field(raw, "m_nodes", "a positive integer", &mut issues),
        };
        let k_nn: Option<usize> = match fields.get("k_nn") {
            None => Some(10),
            raw => parse_field(raw, "k_nn", "a positive integer", &mut issues),
        };
        let m_eigs: Option<usize> = match fields.get("m_eigs") {
            None => k_clusters,
            raw => parse_field(raw, "m_eigs", "a positive integer", &mut issues),
        };
        let seed: Option<u64> = match fields.get("seed") {
            None => Some(0),
            raw => parse_field(raw, "seed", "a non-negative integer", &mut issues),
        };
        let output_dir = fields
            .get("output.dir")
            .map_or_else(|| PathBuf::from("runs"), PathBuf::from);

        for (key, value) in [
            ("k_clusters", k_clusters),
            ("k_nn", k_nn),
            ("m_nodes", m_nodes),
            ("m_eigs", m_eigs),
        ] {
            if value == Some(0) {
                issues.push(format!("{key}: must be at least 1"));
            }
        }

        if !issues.is_empty() {
            return Err(Error::Config { issues });
        }
        Ok(ExperimentConfig {
            dataset_kind: kind.unwrap(),
            dataset_path: path.unwrap(),
            k_clusters: k_clusters.unwrap(),
            k_nn: k_nn.unwrap(),
            m_nodes: m_nodes.unwrap(),
            m_eigs: m_eigs.unwrap(),
            seed: seed.unwrap(),
            output_dir,
        })
    }

    /// Render in the config-file syntax (parses back to an equal config).
    pub fn to_config_string(&self) -> String {
        format!(
            "dataset.kind = {}\ndataset.path = {}\nk_clusters = {}\nk_nn = {}\n\
             m_nodes = {}\nm_eigs = {}\nseed = {}\noutput.dir = {}\n",
            self.dataset_kind.as_str(),
            self.dataset_path,
            self.k_clusters,
            self.k_nn,
            self.m_nodes,
            self.m_eigs,
            self.seed,
            self.output_dir.display()
        )
    }
}

/// Parsed form of the blob-generator spec string.
#[derive(Debug, Clone, PartialEq)]
struct BlobSpec {
    n_per: usize,
    k: usize,
    d: usize,
    spread: f64,
    noise_dims: usize,
    bridge: Option<f64>,
}

impl BlobSpec {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        let mut parts = s.split(',');
        let head = parts.next().unwrap_or("").trim();
        let (n_per, k) = head
            .split_once('x')
            .ok_or_else(|| format!("blob spec '{s}' must start with '<n_per>x<k>'"))?;
        let n_per: usize = n_per
            .trim()
            .parse()
            .map_err(|_| format!("blob spec: '{n_per}' is not a positive integer"))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| format!("blob spec: '{k}' is not a positive integer"))?;
        let mut spec = BlobSpec {
            n_per,
            k,
            d: 2,
            spread: 0.08,
            noise_dims: 0,
            bridge: None,
        };
        for part in parts {
            let part = part.trim();
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("blob spec: expected 'field=value', got '{part}'"))?;
            match key.trim() {
                "d" => {
                    spec.d = value
                        .trim()
                        .parse()
                        .map_err(|_| format!("blob spec: d='{value}' is not an integer"))?;
                }
                "spread" => {
                    spec.spread = value
                        .trim()
                        .parse()
                        .map_err(|_| format!("blob spec: spread='{value}' is not a number"))?;
                }
                "noise" => {
                    spec.noise_dims = value
                        .trim()
                        .parse()
                        .map_err(|_| format!("blob spec: noise='{value}' is not an integer"))?;
                }
                "bridge" => {
                    let frac: f64 = value
                        .trim()
                        .parse()
                        .map_err(|_| format!("blob spec: bridge='{value}' is not a number"))?;
                    spec.bridge = Some(frac);
                }
                other => return Err(format!("blob spec: unknown field '{other}'")),
            }
        }
        if spec.n_per == 0 || spec.k == 0 || spec.d == 0 {
            return Err("blob spec: n_per, k and d must be positive".to_string());
        }
        if !(spec.spread > 0.0) {
            return Err(format!("blob spec: spread must be positive, got {}", spec.spread));
        }
        if let Some(frac) = spec.bridge {
            if !(frac > 0.0 && frac < 1.0) {
                return Err(format!("blob spec: bridge must lie in (0, 1), got {frac}"));
            }
        }
        Ok(spec)
    }
}

/// For an idx3 image file, the conventional idx1 label file next to it
/// (`images`→`labels`, `idx3`→`idx1`), if that file exists.
fn conventional_idx_labels(images: &Path) -> Option<PathBuf> {
    let name = images.file_name()?.to_str()?;
    let label_name = name.replace("images", "labels").replace("idx3", "idx1");
    if label_name == name {
        return None;
    }
    let candidate = images.with_file_name(label_name);
    candidate.is_file().then_some(candidate)
}

/// Materialize the dataset a config's `dataset.kind`/`dataset.path` pair
/// describes. Blob generation (including bridge corruption) is seeded with
/// `seed`.
pub fn load_dataset(kind: DatasetKind, path: &str, seed: u64) -> Result<PointSet> {
    match kind {
        DatasetKind::Csv => load_csv(path, None),
        DatasetKind::CsvLabeled => {
            let text = fs::read_to_string(path)?;
            let width = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .map(|l| l.split(',').count())
                .unwrap_or(0);
            if width < 2 {
                return Err(Error::Format {
                    path: path.into(),
                    reason: "a labeled CSV needs at least one feature column plus the label"
                        .to_string(),
                });
            }
            load_csv(path, Some(width - 1))
        }
        DatasetKind::Idx => {
            let labels = conventional_idx_labels(Path::new(path));
            load_idx(path, labels.as_deref())
        }
        DatasetKind::Blobs => {
            let spec = BlobSpec::parse(path).map_err(Error::Parameter)?;
            let ps = make_blobs(spec.n_per, spec.k, spec.d, spec.spread, spec.noise_dims, seed)?;
            match spec.bridge {
                Some(frac) => Ok(add_bridge_noise(&ps, frac, seed)?.0),
                None => Ok(ps),
            }
        }
    }
}

/// Everything one experiment produces. Serializes losslessly through
/// [`ExperimentReport::to_machine_string`] / [`ExperimentReport::parse_machine`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub k_clusters: usize,
    pub k_nn: usize,
    pub m_nodes: usize,
    pub m_eigs: usize,
    pub seed: u64,
    /// Plain-pipeline accuracy; absent when the dataset has no labels.
    pub acc_baseline: Option<f64>,
    /// Robust-pipeline accuracy; absent when the dataset has no labels.
    pub acc_robust: Option<f64>,
    /// Wall seconds per stage, keyed `baseline.*` / `robust.*`. The
    /// `robust.spade` figure contains the full-size generalized eigensolve,
    /// so both readings of "eigendecomposition time" are recoverable.
    pub stage_seconds: BTreeMap<String, f64>,
    /// The baseline's full-size Laplacian eigensolve.
    pub eig_time_full: f64,
    /// The robust subset's Laplacian eigensolve (graph builds are reported
    /// as their own stages, so the two eig times compare like for like).
    pub eig_time_subset: f64,
    /// `eig_time_full / eig_time_subset`.
    pub speedup: f64,
}

impl ExperimentReport {
    /// One `key = value` field per line, fixed order; floats in shortest
    /// round-trip form. ACC lines are omitted for unlabeled datasets.
    pub fn to_machine_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dataset = {}", self.dataset);
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "d = {}", self.d);
        let _ = writeln!(out, "k_clusters = {}", self.k_clusters);
        let _ = writeln!(out, "k_nn = {}", self.k_nn);
        let _ = writeln!(out, "m_nodes = {}", self.m_nodes);
        let _ = writeln!(out, "m_eigs = {}", self.m_eigs);
        let _ = writeln!(out, "seed = {}", self.seed);
        if let Some(a) = self.acc_baseline {
            let _ = writeln!(out, "acc_baseline = {a}");
        }
        if let Some(a) = self.acc_robust {
            let _ = writeln!(out, "acc_robust = {a}");
        }
        for (stage, secs) in &self.stage_seconds {
            let _ = writeln!(out, "stage.{stage} = {secs}");
        }
        let _ = writeln!(out, "eig_time_full = {}", self.eig_time_full);
        let _ = writeln!(out, "eig_time_subset = {}", self.eig_time_subset);
        let _ = writeln!(out, "speedup = {}", self.speedup);
        out
    }

    /// Inverse of [`Self::to_machine_string`].
    pub fn parse_machine(text: &str) -> Result<Self> {
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        let mut stages: BTreeMap<String, f64> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parameter(format!(
                    "report line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            if let Some(stage) = key.strip_prefix("stage.") {
                let secs: f64 = value.parse().map_err(|_| {
                    Error::Parameter(format!("report: stage.{stage} = '{value}' is not a number"))
                })?;
                stages.insert(stage.to_string(), secs);
            } else {
                fields.insert(key.to_string(), value.to_string());
            }
        }

        fn req<'a>(fields: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
            fields
                .get(key)
                .map(String::as_str)
                .ok_or_else(|| Error::Parameter(format!("report: missing field '{key}'")))
        }
        fn num<T: std::str::FromStr>(value: &str, key: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Parameter(format!("report: {key} = '{value}' is not a number")))
        }
        let opt_num = |key: &str| -> Result<Option<f64>> {
            fields.get(key).map(|v| num(v, key)).transpose()
        };

        Ok(ExperimentReport {
            dataset: req(&fields, "dataset")?.to_string(),
            n: num(req(&fields, "n")?, "n")?,
            d: num(req(&fields, "d")?, "d")?,
            k_clusters: num(req(&fields, "k_clusters")?, "k_clusters")?,
            k_nn: num(req(&fields, "k_nn")?, "k_nn")?,
            m_nodes: num(req(&fields, "m_nodes")?, "m_nodes")?,
            m_eigs: num(req(&fields, "m_eigs")?, "m_eigs")?,
            seed: num(req(&fields, "seed")?, "seed")?,
            acc_baseline: opt_num("acc_baseline")?,
            acc_robust: opt_num("acc_robust")?,
            stage_seconds: stages,
            eig_time_full: num(req(&fields, "eig_time_full")?, "eig_time_full")?,
            eig_time_subset: num(req(&fields, "eig_time_subset")?, "eig_time_subset")?,
            speedup: num(req(&fields, "speedup")?, "speedup")?,
        })
    }
}

/// Run the plain and the robust pipeline under the config's seed and collect
/// the comparison (see module docs). Does not touch `output.dir` — pair with
/// [`write_report`] to persist the result.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let ps = load_dataset(config.dataset_kind, &config.dataset_path, config.seed)?;
    let options = SolverOptions {
        seed: config.seed,
        ..SolverOptions::default()
    };

    let (baseline, baseline_times) = spectral_clustering_timed(
        &ps,
        config.k_clusters,
        config.k_nn,
        config.seed,
        &options,
    )?;
    let params = RobustParams {
        k_nn: config.k_nn,
        k_clusters: config.k_clusters,
        m_nodes: config.m_nodes,
        m_eigs: config.m_eigs,
        seed: config.seed,
    };
    let robust = robust_spectral_clustering_with(&ps, &params, &options)?;

    let (acc_baseline, acc_robust) = match ps.labels() {
        Some(truth) => (
            Some(acc(&baseline.labels, truth)?),
            Some(acc(&robust.full_labels, truth)?),
        ),
        None => (None, None),
    };

    let mut stage_seconds = BTreeMap::new();
    stage_seconds.insert("baseline.graph".to_string(), baseline_times.graph);
    stage_seconds.insert("baseline.eig".to_string(), baseline_times.eig);
    stage_seconds.insert("baseline.kmeans".to_string(), baseline_times.kmeans);
    for (stage, secs) in &robust.timings {
        stage_seconds.insert(format!("robust.{stage}"), *secs);
    }

    let eig_time_full = baseline_times.eig;
    let eig_time_subset = robust.timings["subset_eig"];
    Ok(ExperimentReport {
        dataset: ps.name().to_string(),
        n: ps.n(),
        d: ps.dim(),
        k_clusters: config.k_clusters,
        k_nn: config.k_nn,
        m_nodes: config.m_nodes,
        m_eigs: config.m_eigs,
        seed: config.seed,
        acc_baseline,
        acc_robust,
        stage_seconds,
        eig_time_full,
        eig_time_subset,
        speedup: eig_time_full / eig_time_subset,
    })
}

/// Write the machine-format report into `dir` as
/// `<dataset>-seed<seed>.report` (path separators in the dataset name are
/// flattened). Returns the file path.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let safe: String = report
        .dataset
        .chars()
        .map(|c| if c == '/' || c == '\\' || c.is_whitespace() { '_' } else { c })
        .collect();
    let path = dir.join(format!("{safe}-seed{}.report", report.seed));
    fs::write(&path, report.to_machine_string())?;
    Ok(path)
}
