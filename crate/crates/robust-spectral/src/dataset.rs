//! Dataset ingestion and synthesis.
//!
//! Three sources feed the pipeline: IDX image/label files (the MNIST binary
//! layout), numeric CSV files, and seeded synthetic Gaussian blobs with
//! optional pure-noise columns for noise-robustness experiments.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// An immutable labeled point cloud: `n` rows of `d` features.
///
/// Construction validates that all entries are finite and, when labels are
/// present, that they form a dense `0..c` class range of the right length.
#[derive(Debug, Clone)]
pub struct PointSet {
    name: String,
    points: Array2<f64>,
    labels: Option<Vec<usize>>,
    /// Label values as they appeared in the source, before dense re-encoding.
    original_labels: Option<Vec<i64>>,
}

impl PointSet {
    pub fn new(
        name: impl Into<String>,
        points: Array2<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let (n, d) = points.dim();
        if n == 0 || d == 0 {
            return Err(Error::Parameter(format!(
                "point set must be non-empty, got {n} x {d}"
            )));
        }
        if let Some(bad) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite feature value at flat index {bad}"
            )));
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::Inconsistent(format!(
                    "{} labels for {n} points",
                    l.len()
                )));
            }
        }
        let original_labels = labels
            .as_ref()
            .map(|l| l.iter().map(|&v| v as i64).collect());
        Ok(Self {
            name: name.into(),
            points,
            labels,
            original_labels,
        })
    }

    fn with_original_labels(mut self, original: Vec<i64>) -> Self {
        self.original_labels = Some(original);
        self
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Source label values before dense re-encoding, aligned with rows.
    pub fn original_labels(&self) -> Option<&[i64]> {
        self.original_labels.as_deref()
    }

    /// Number of classes (`max label + 1`) when labels are present.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Extract the sub point set given by `ids` (row order preserved).
    pub fn subset(&self, ids: &[usize]) -> Result<PointSet> {
        if let Some(&bad) = ids.iter().find(|&&i| i >= self.n()) {
            return Err(Error::Parameter(format!(
                "subset id {bad} out of range for {} points",
                self.n()
            )));
        }
        let d = self.dim();
        let mut points = Array2::zeros((ids.len(), d));
        for (row, &i) in ids.iter().enumerate() {
            points.row_mut(row).assign(&self.points.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| ids.iter().map(|&i| l[i]).collect());
        let sub = PointSet::new(format!("{}[{}]", self.name, ids.len()), points, labels)?;
        Ok(match &self.original_labels {
            Some(orig) => sub.with_original_labels(ids.iter().map(|&i| orig[i]).collect()),
            None => sub,
        })
    }
}

fn read_be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected: end,
            actual: bytes.len(),
        });
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

fn stem_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}

/// Load an IDX image file (and optionally its label file) into a [`PointSet`].
///
/// Images are flattened row-major to `rows * cols` features and scaled from
/// `0..=255` to `[0, 1]`.
pub fn load_idx(
    images_path: impl AsRef<Path>,
    labels_path: Option<&Path>,
) -> Result<PointSet> {
    let images_path = images_path.as_ref();
    let bytes = fs::read(images_path)?;
    let magic = read_be_u32(&bytes, 0, images_path)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Format {
            path: images_path.to_path_buf(),
            reason: format!("bad magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x} (idx3 images)"),
        });
    }
    let n = read_be_u32(&bytes, 4, images_path)? as usize;
    let rows = read_be_u32(&bytes, 8, images_path)? as usize;
    let cols = read_be_u32(&bytes, 12, images_path)? as usize;
    let d = rows * cols;
    let payload = &bytes[16..];
    if payload.len() != n * d {
        return Err(Error::Truncated {
            path: images_path.to_path_buf(),
            expected: n * d,
            actual: payload.len(),
        });
    }
    let points = Array2::from_shape_fn((n, d), |(i, j)| f64::from(payload[i * d + j]) / 255.0);

    let labels = match labels_path {
        None => None,
        Some(lp) => {
            let lbytes = fs::read(lp)?;
            let lmagic = read_be_u32(&lbytes, 0, lp)?;
            if lmagic != IDX_LABELS_MAGIC {
                return Err(Error::Format {
                    path: lp.to_path_buf(),
                    reason: format!(
                        "bad magic {lmagic:#010x}, expected {IDX_LABELS_MAGIC:#010x} (idx1 labels)"
                    ),
                });
            }
            let ln = read_be_u32(&lbytes, 4, lp)? as usize;
            let lpayload = &lbytes[8..];
            if lpayload.len() != ln {
                return Err(Error::Truncated {
                    path: lp.to_path_buf(),
                    expected: ln,
                    actual: lpayload.len(),
                });
            }
            if ln != n {
                return Err(Error::Inconsistent(format!(
                    "{n} images but {ln} labels"
                )));
            }
            Some(lpayload.iter().map(|&b| b as usize).collect())
        }
    };

    PointSet::new(stem_name(images_path), points, labels)
}

/// Load a numeric CSV file. A non-numeric first row is treated as a header
/// and skipped. When `label_column` is given, that column becomes the label
/// vector, re-encoded to a dense `0..c` range in first-seen order; original
/// values are retained as metadata.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<usize>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows.push((lineno + 1, line.split(',').map(str::trim).collect()));
    }
    if rows.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: "no data rows".to_string(),
        });
    }
    // Header detection: a first row with any non-numeric cell is a header.
    if rows[0].1.iter().any(|c| c.parse::<f64>().is_err()) {
        rows.remove(0);
        if rows.is_empty() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                reason: "only a header row, no data".to_string(),
            });
        }
    }

    let width = rows[0].1.len();
    if let Some((lineno, cells)) = rows.iter().find(|(_, c)| c.len() != width) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!(
                "ragged row at line {lineno}: {} cells, expected {width}",
                cells.len()
            ),
        });
    }
    if let Some(lc) = label_column {
        if lc >= width {
            return Err(Error::Parameter(format!(
                "label column {lc} out of range for {width}-column file"
            )));
        }
    }

    let n = rows.len();
    let d = width - usize::from(label_column.is_some());
    if d == 0 {
        return Err(Error::Parameter(
            "no feature columns left after removing the label column".to_string(),
        ));
    }

    let mut points = Array2::zeros((n, d));
    let mut raw_labels: Vec<i64> = Vec::new();
    for (row, (lineno, cells)) in rows.iter().enumerate() {
        let mut col_out = 0usize;
        for (col, cell) in cells.iter().enumerate() {
            if Some(col) == label_column {
                let v: f64 = cell.parse().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: *lineno,
                    column: col + 1,
                    reason: format!("{e}"),
                })?;
                if v.fract() != 0.0 || !v.is_finite() {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: *lineno,
                        column: col + 1,
                        reason: format!("label {v} is not an integer"),
                    });
                }
                raw_labels.push(v as i64);
            } else {
                points[[row, col_out]] = cell.parse().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: *lineno,
                    column: col + 1,
                    reason: format!("{e}"),
                })?;
                col_out += 1;
            }
        }
    }

    let labels = if label_column.is_some() {
        // Dense re-encode in first-seen order.
        let mut seen: Vec<i64> = Vec::new();
        let dense = raw_labels
            .iter()
            .map(|&v| match seen.iter().position(|&s| s == v) {
                Some(idx) => idx,
                None => {
                    seen.push(v);
                    seen.len() - 1
                }
            })
            .collect();
        Some(dense)
    } else {
        None
    };

    let ps = PointSet::new(stem_name(path), points, labels)?;
    Ok(if label_column.is_some() {
        ps.with_original_labels(raw_labels)
    } else {
        ps
    })
}

/// Write a point set as CSV; dense labels, when present, become the last
/// column. Values are printed in shortest round-trip form.
pub fn write_csv(ps: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = fs::File::create(path.as_ref())?;
    let mut line = String::new();
    for i in 0..ps.n() {
        line.clear();
        for (j, v) in ps.points.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v}"));
        }
        if let Some(labels) = ps.labels() {
            line.push_str(&format!(",{}", labels[i]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Generate `k_clusters` isotropic Gaussian blobs with unit-separated means
/// placed along coordinate axes, plus `noise_dims` columns of pure standard
/// Gaussian noise appended to every point. Deterministic for a fixed seed.
pub fn make_blobs(
    n_per_cluster: usize,
    k_clusters: usize,
    d: usize,
    spread: f64,
    noise_dims: usize,
    seed: u64,
) -> Result<PointSet> {
    if n_per_cluster == 0 || k_clusters == 0 || d == 0 {
        return Err(Error::Parameter(
            "n_per_cluster, k_clusters and d must all be positive".to_string(),
        ));
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::Parameter(format!("spread must be positive, got {spread}")));
    }

    let n = n_per_cluster * k_clusters;
    let total_d = d + noise_dims;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;

    // Cluster c is centred on axis (c mod d) at offset 1 + c/d, so any two
    // means are at least one unit apart.
    let mut means = Array2::zeros((k_clusters, d));
    for c in 0..k_clusters {
        means[[c, c % d]] = 1.0 + (c / d) as f64;
    }

    let mut points = Array2::zeros((n, total_d));
    let mut labels = Vec::with_capacity(n);
    for c in 0..k_clusters {
        for p in 0..n_per_cluster {
            let row = c * n_per_cluster + p;
            for j in 0..d {
                let z: f64 = normal.sample(&mut rng);
                points[[row, j]] = means[[c, j]] + spread * z;
            }
            for j in 0..noise_dims {
                let z: f64 = normal.sample(&mut rng);
                points[[row, d + j]] = z;
            }
            labels.push(c);
        }
    }

    PointSet::new(
        format!("blobs-n{n_per_cluster}x{k_clusters}-d{d}+{noise_dims}-seed{seed}"),
        points,
        Some(labels),
    )
}

/// Corrupt a labeled point set by dragging a fraction of its points onto the
/// corridor between their own class centroid and another class's centroid.
///
/// Each displaced point lands at the midpoint `(own + other)/2`, plus
/// per-coordinate Gaussian jitter of `0.03·‖other − own‖`. The displaced
/// points pile up into dense clumps at the corridor midpoints, forming
/// low-conductance paths between classes — noisy wiring strong enough to
/// derail plain spectral clustering. Labels are kept unchanged: the
/// displaced points still count against their original class when scoring
/// accuracy.
///
/// Returns the corrupted point set and the sorted ids of displaced points.
/// Deterministic for a fixed seed. Requires labels with at least two
/// classes; `frac` must lie in `(0, 1)`.
pub fn add_bridge_noise(ps: &PointSet, frac: f64, seed: u64) -> Result<(PointSet, Vec<usize>)> {
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::Parameter(format!(
            "bridge fraction must lie in (0, 1), got {frac}"
        )));
    }
    let labels = ps.labels().ok_or_else(|| {
        Error::Parameter("bridge noise needs class labels to find centroids".to_string())
    })?;
    let n = ps.n();
    let d = ps.dim();
    let c = ps.n_classes().unwrap_or(0);

    let mut centroids = Array2::<f64>::zeros((c, d));
    let mut counts = vec![0usize; c];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for j in 0..d {
            centroids[[l, j]] += ps.points()[[i, j]];
        }
    }
    let occupied: Vec<usize> = (0..c).filter(|&l| counts[l] > 0).collect();
    if occupied.len() < 2 {
        return Err(Error::Parameter(format!(
            "bridge noise needs at least two non-empty classes, got {}",
            occupied.len()
        )));
    }
    for &l in &occupied {
        for j in 0..d {
            centroids[[l, j]] /= counts[l] as f64;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let n_bad = ((n as f64) * frac).round().max(1.0) as usize;
    // Partial Fisher-Yates: the first n_bad slots end up a uniform sample
    // without replacement.
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..n_bad {
        let j = rng.random_range(i..n);
        order.swap(i, j);
    }
    let mut displaced: Vec<usize> = order[..n_bad].to_vec();
    displaced.sort_unstable();

    let mut points = ps.points().clone();
    for &i in &displaced {
        let own = labels[i];
        let mut other = occupied[rng.random_range(0..occupied.len())];
        while other == own {
            other = occupied[rng.random_range(0..occupied.len())];
        }
        let gap: f64 = (0..d)
            .map(|j| (centroids[[other, j]] - centroids[[own, j]]).powi(2))
            .sum::<f64>()
            .sqrt();
        for j in 0..d {
            let mid = 0.5 * (centroids[[own, j]] + centroids[[other, j]]);
            let z: f64 = normal.sample(&mut rng);
            points[[i, j]] = mid + 0.03 * gap * z;
        }
    }

    let corrupted = PointSet::new(
        format!("{}+bridge{n_bad}", ps.name()),
        points,
        Some(labels.to_vec()),
    )?;
    Ok((corrupted, displaced))
}
