//! Multi-view dataset container, on-disk formats, and a synthetic generator.
//!
//! A dataset is `V` feature matrices over the same `n` samples. Matrices are
//! stored features-by-samples (`d_v × n`), so a sample is one column in every
//! view. Directories on disk hold a `meta.json` index plus one payload file
//! per view (CSV or binary) and an optional labels file.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magic bytes opening every binary view file.
pub const BINARY_MAGIC: [u8; 4] = *b"MVDM";
/// Current binary payload version.
pub const BINARY_VERSION: u32 = 1;

/// Payload encoding for a view matrix on disk.
///
/// CSV is inspectable; binary is bit-exact and canonical for round-trips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewFormat {
    Csv,
    Bin,
}

/// One feature representation of the samples, shaped `d_v × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewMatrix {
    pub name: String,
    pub data: DMatrix<f64>,
}

impl ViewMatrix {
    pub fn new(name: impl Into<String>, data: DMatrix<f64>) -> Result<Self> {
        let name = name.into();
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::validation(format!("view '{name}' is empty")));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::validation(format!(
                "view '{name}' contains non-finite entries"
            )));
        }
        Ok(Self { name, data })
    }

    /// Feature count `d_v`.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Sample count `n`.
    pub fn n(&self) -> usize {
        self.data.ncols()
    }
}

/// `V` views over the same samples plus optional ground-truth labels.
///
/// Immutable after construction; shareable across threads for reading.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<ViewMatrix>,
    n: usize,
    labels: Option<Vec<usize>>,
}

impl MultiViewDataset {
    /// Validates view shapes and label contiguity. Labels must already be
    /// 0-based contiguous class indices; use [`remap_labels`] for arbitrary
    /// alphabets.
    pub fn new(views: Vec<ViewMatrix>, labels: Option<Vec<usize>>) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::validation("a dataset needs at least one view"));
        }
        let n = views[0].n();
        for view in &views {
            if view.n() != n {
                return Err(Error::validation(format!(
                    "view '{}' has {} samples, expected {}",
                    view.name,
                    view.n(),
                    n
                )));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::validation(format!(
                    "labels length {} does not match sample count {}",
                    labels.len(),
                    n
                )));
            }
            let k = labels.iter().max().map_or(0, |m| m + 1);
            let mut seen = vec![false; k];
            for &l in labels {
                seen[l] = true;
            }
            if !seen.iter().all(|&s| s) {
                return Err(Error::validation(
                    "labels are not contiguous: some class in [0, k) never occurs",
                ));
            }
        }
        Ok(Self { views, n, labels })
    }

    pub fn views(&self) -> &[ViewMatrix] {
        &self.views
    }

    pub fn view(&self, v: usize) -> &ViewMatrix {
        &self.views[v]
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Number of ground-truth classes, when labels are present.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    /// Scales every sample column of every view to unit L2 norm.
    /// Zero columns are left untouched.
    pub fn normalize_per_sample_l2(&mut self) {
        for view in &mut self.views {
            for mut col in view.data.column_iter_mut() {
                let norm = col.norm();
                if norm > 0.0 {
                    col /= norm;
                }
            }
        }
    }
}

/// Re-maps an arbitrary integer label alphabet to `0..k` in first-occurrence
/// order, so metrics can index contingency tables directly.
pub fn remap_labels(raw: &[i64]) -> Vec<usize> {
    let mut order: Vec<i64> = Vec::new();
    let mut out = Vec::with_capacity(raw.len());
    for &r in raw {
        let idx = match order.iter().position(|&o| o == r) {
            Some(idx) => idx,
            None => {
                order.push(r);
                order.len() - 1
            }
        };
        out.push(idx);
    }
    out
}

// ---------------------------------------------------------------------------
// On-disk format
// ---------------------------------------------------------------------------

/// Contents of `meta.json`: dataset name, sample count, view index, and an
/// optional labels file (omitted when the dataset is unlabeled).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub name: String,
    pub n: usize,
    pub views: Vec<ViewMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_file: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViewMeta {
    pub name: String,
    pub d: usize,
    pub file: String,
    pub format: ViewFormat,
}

/// Reads and parses `meta.json` from a dataset directory.
pub fn read_meta(dir: impl AsRef<Path>) -> Result<DatasetMeta> {
    let path = dir.as_ref().join("meta.json");
    let file = fs::File::open(&path)?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::validation(format!("malformed meta.json: {e}")))
}

/// Loads a dataset directory, validating shapes against the metadata.
/// View order follows `meta.json`; labels are re-mapped to contiguous
/// 0-based indices in first-occurrence order.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<MultiViewDataset> {
    let dir = dir.as_ref();
    let meta = read_meta(dir)?;
    if meta.n == 0 {
        return Err(Error::validation("meta.json declares n = 0"));
    }
    let mut views = Vec::with_capacity(meta.views.len());
    for vm in &meta.views {
        let path = dir.join(&vm.file);
        let data = match vm.format {
            ViewFormat::Csv => read_view_csv(&mut open_buffered(&path)?)?,
            ViewFormat::Bin => read_view_bin(&mut open_buffered(&path)?)?,
        };
        if data.nrows() != vm.d || data.ncols() != meta.n {
            return Err(Error::validation(format!(
                "view '{}': payload is {}x{} but meta.json declares {}x{}",
                vm.name,
                data.nrows(),
                data.ncols(),
                vm.d,
                meta.n
            )));
        }
        views.push(ViewMatrix::new(vm.name.clone(), data)?);
    }
    let labels = match &meta.labels_file {
        Some(f) => {
            let raw = read_labels_csv(dir.join(f))?;
            if raw.len() != meta.n {
                return Err(Error::validation(format!(
                    "labels file has {} entries, expected {}",
                    raw.len(),
                    meta.n
                )));
            }
            Some(remap_labels(&raw))
        }
        None => None,
    };
    MultiViewDataset::new(views, labels)
}

/// Writes a dataset directory (`meta.json` + one payload file per view +
/// `labels.csv` when labels exist). Reloading reproduces the dataset
/// bit-exactly for both formats.
pub fn save_dataset(
    ds: &MultiViewDataset,
    dir: impl AsRef<Path>,
    format: ViewFormat,
    name: &str,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let ext = match format {
        ViewFormat::Csv => "csv",
        ViewFormat::Bin => "bin",
    };
    let mut view_metas = Vec::with_capacity(ds.n_views());
    for (i, view) in ds.views().iter().enumerate() {
        let file = format!("view_{i}.{ext}");
        let mut w = BufWriter::new(fs::File::create(dir.join(&file))?);
        match format {
            ViewFormat::Csv => write_view_csv(&mut w, &view.data)?,
            ViewFormat::Bin => write_view_bin(&mut w, &view.data)?,
        }
        w.flush()?;
        view_metas.push(ViewMeta {
            name: view.name.clone(),
            d: view.dim(),
            file,
            format,
        });
    }
    let labels_file = match ds.labels() {
        Some(labels) => {
            let file = "labels.csv".to_string();
            let mut w = BufWriter::new(fs::File::create(dir.join(&file))?);
            for &l in labels {
                writeln!(w, "{l}")?;
            }
            w.flush()?;
            Some(file)
        }
        None => None,
    };
    let meta = DatasetMeta {
        name: name.to_string(),
        n: ds.n(),
        views: view_metas,
        labels_file,
    };
    let mut w = BufWriter::new(fs::File::create(dir.join("meta.json"))?);
    serde_json::to_writer_pretty(&mut w, &meta)
        .map_err(|e| Error::validation(format!("meta serialization failed: {e}")))?;
    w.flush()?;
    Ok(())
}

fn open_buffered(path: &Path) -> Result<BufReader<fs::File>> {
    Ok(BufReader::new(fs::File::open(path)?))
}

/// CSV payload: `d_v` lines of `n` comma-separated decimal values
/// (features are rows, samples are columns).
pub fn write_view_csv(w: &mut impl Write, data: &DMatrix<f64>) -> io::Result<()> {
    for i in 0..data.nrows() {
        for j in 0..data.ncols() {
            if j > 0 {
                w.write_all(b",")?;
            }
            // Display for f64 emits the shortest string that reparses to the
            // same bits, so CSV round-trips are exact for finite values.
            write!(w, "{}", data[(i, j)])?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_view_csv(r: &mut impl BufRead) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::validation(format!(
                        "csv line {}: cannot parse '{}' as a number",
                        lineno + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::validation(format!(
                    "csv line {}: {} values, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::validation("csv view file is empty"));
    }
    let (d, n) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(d, n, |i, j| rows[i][j]))
}

/// Binary payload: magic `MVDM`, little-endian u32 version, u64 rows, u64
/// cols, then rows*cols little-endian f64 values in row-major order.
pub fn write_view_bin(w: &mut impl Write, data: &DMatrix<f64>) -> io::Result<()> {
    w.write_all(&BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&(data.nrows() as u64).to_le_bytes())?;
    w.write_all(&(data.ncols() as u64).to_le_bytes())?;
    for i in 0..data.nrows() {
        for j in 0..data.ncols() {
            w.write_all(&data[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_view_bin(r: &mut impl Read) -> Result<DMatrix<f64>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != BINARY_MAGIC {
        return Err(Error::validation("bad magic bytes in binary view file"));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != BINARY_VERSION {
        return Err(Error::validation(format!(
            "unsupported binary view version {version}"
        )));
    }
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let rows = u64::from_le_bytes(u64buf) as usize;
    r.read_exact(&mut u64buf)?;
    let cols = u64::from_le_bytes(u64buf) as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::validation("binary view declares an empty matrix"));
    }
    let mut data = DMatrix::zeros(rows, cols);
    let mut f64buf = [0u8; 8];
    for i in 0..rows {
        for j in 0..cols {
            r.read_exact(&mut f64buf).map_err(|e| {
                if e.kind() == io::ErrorKind::UnexpectedEof {
                    Error::validation(format!(
                        "binary view payload truncated: header declares {rows}x{cols}"
                    ))
                } else {
                    Error::Io(e)
                }
            })?;
            data[(i, j)] = f64::from_le_bytes(f64buf);
        }
    }
    Ok(data)
}

/// Labels file: one integer per line, `n` lines.
pub fn read_labels_csv(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    let file = fs::File::open(path.as_ref())?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(t.parse::<i64>().map_err(|_| {
            Error::validation(format!(
                "labels line {}: cannot parse '{}' as an integer",
                lineno + 1,
                t
            ))
        })?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

/// Recipe for a synthetic multi-view mixture: `k_true` cluster centers in a
/// shared latent space, observed through one random linear map per view.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n: usize,
    pub views: usize,
    pub k_true: usize,
    pub latent_dim: usize,
    pub view_dims: Vec<usize>,
    pub noise_sigma: f64,
    pub center_spread: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.views == 0 || self.k_true == 0 || self.latent_dim == 0 {
            return Err(Error::validation(
                "n, views, k_true, and latent_dim must all be positive",
            ));
        }
        if self.n < self.k_true {
            return Err(Error::validation(format!(
                "n = {} is smaller than k_true = {}",
                self.n, self.k_true
            )));
        }
        if self.view_dims.len() != self.views {
            return Err(Error::validation(format!(
                "view_dims has {} entries, expected {}",
                self.view_dims.len(),
                self.views
            )));
        }
        if self.view_dims.iter().any(|&d| d == 0) {
            return Err(Error::validation("every view dimension must be >= 1"));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::validation("noise_sigma must be nonnegative"));
        }
        if !(self.center_spread > 0.0) {
            return Err(Error::validation("center_spread must be positive"));
        }
        Ok(())
    }
}

/// Draws a labeled synthetic dataset. Deterministic for a fixed spec.
///
/// Samples are assigned to clusters round-robin. Sample `i` has latent
/// coordinates `center[i % k] + sigma*eps_i` shared by all views; view `v`
/// observes `P_v * latent + sigma*eta` through a seeded random map `P_v`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<MultiViewDataset> {
    generate_synthetic_with_latents(spec).map(|(ds, _)| ds)
}

/// Like [`generate_synthetic`], also returning the noiseless latent
/// coordinates (`latent_dim × n`, column `i` = center of cluster `i % k`).
/// Useful as a separability reference for the generated problem.
pub fn generate_synthetic_with_latents(
    spec: &SyntheticSpec,
) -> Result<(MultiViewDataset, DMatrix<f64>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = StandardNormal;

    let mut centers = DMatrix::zeros(spec.latent_dim, spec.k_true);
    for j in 0..spec.k_true {
        for i in 0..spec.latent_dim {
            let g: f64 = rng.sample(normal);
            centers[(i, j)] = spec.center_spread * g;
        }
    }

    let map_scale = 1.0 / (spec.latent_dim as f64).sqrt();
    let mut maps = Vec::with_capacity(spec.views);
    for &dv in &spec.view_dims {
        let mut p = DMatrix::zeros(dv, spec.latent_dim);
        for j in 0..spec.latent_dim {
            for i in 0..dv {
                let g: f64 = rng.sample(normal);
                p[(i, j)] = map_scale * g;
            }
        }
        maps.push(p);
    }

    let mut noiseless = DMatrix::zeros(spec.latent_dim, spec.n);
    let mut latent = DMatrix::zeros(spec.latent_dim, spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let c = i % spec.k_true;
        labels.push(c);
        for r in 0..spec.latent_dim {
            let g: f64 = rng.sample(normal);
            noiseless[(r, i)] = centers[(r, c)];
            latent[(r, i)] = centers[(r, c)] + spec.noise_sigma * g;
        }
    }

    let mut views = Vec::with_capacity(spec.views);
    for (v, p) in maps.iter().enumerate() {
        let mut data = p * &latent;
        for j in 0..spec.n {
            for i in 0..data.nrows() {
                let g: f64 = rng.sample(normal);
                data[(i, j)] += spec.noise_sigma * g;
            }
        }
        views.push(ViewMatrix::new(format!("view{v}"), data)?);
    }

    let ds = MultiViewDataset::new(views, Some(labels))?;
    Ok((ds, noiseless))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn tiny_dataset() -> MultiViewDataset {
        let v0 = ViewMatrix::new(
            "a",
            DMatrix::from_row_slice(3, 4, &[1.0, 2.0, 3.0, 4.0, 0.5, -1.0, 2.5, 0.0, 9.0, 8.0, 7.0, 6.0]),
        )
        .unwrap();
        let v1 = ViewMatrix::new(
            "b",
            DMatrix::from_row_slice(2, 4, &[0.1, 0.2, 0.3, 0.4, -0.5, 1.5, 2.5, -3.5]),
        )
        .unwrap();
        MultiViewDataset::new(vec![v0, v1], Some(vec![0, 0, 1, 1])).unwrap()
    }

    #[test]
    fn tiny_shapes_round_trip() {
        let ds = tiny_dataset();
        assert_eq!(ds.n_views(), 2);
        assert_eq!(ds.n(), 4);
        assert_eq!(ds.n_classes(), Some(2));
    }

    #[test]
    fn rejects_mismatched_sample_counts() {
        let v0 = ViewMatrix::new("a", DMatrix::zeros(3, 5)).unwrap();
        let v1 = ViewMatrix::new("b", DMatrix::zeros(2, 6)).unwrap();
        let err = MultiViewDataset::new(vec![v0, v1], None).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 1)] = f64::NAN;
        assert!(matches!(
            ViewMatrix::new("bad", m),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn rejects_wrong_label_length() {
        let v0 = ViewMatrix::new("a", DMatrix::zeros(2, 4)).unwrap();
        let err = MultiViewDataset::new(vec![v0], Some(vec![0, 1])).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn remap_preserves_first_occurrence_order() {
        assert_eq!(remap_labels(&[7, 7, -3, 7, 12, -3]), vec![0, 0, 1, 0, 2, 1]);
    }

    #[test]
    fn binary_round_trip_is_bit_exact_on_disk() {
        let ds = tiny_dataset();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path(), ViewFormat::Bin, "tiny").unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data = DMatrix::from_fn(5, 7, |_, _| {
            let g: f64 = rng.sample(StandardNormal);
            g * 1e3
        });
        let ds = MultiViewDataset::new(
            vec![ViewMatrix::new("v", data).unwrap()],
            None,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path(), ViewFormat::Csv, "csv").unwrap();
        let back = load_dataset(dir.path()).unwrap();
        let diff = (&ds.view(0).data - &back.view(0).data).abs().max();
        assert!(diff <= 1e-12, "csv round-trip max abs diff {diff}");
    }

    #[test]
    fn unlabeled_dataset_omits_labels_file() {
        let v0 = ViewMatrix::new("a", DMatrix::from_element(2, 3, 1.5)).unwrap();
        let ds = MultiViewDataset::new(vec![v0], None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path(), ViewFormat::Bin, "nolabels").unwrap();
        let raw = fs::read_to_string(dir.path().join("meta.json")).unwrap();
        assert!(!raw.contains("labels_file"));
        let back = load_dataset(dir.path()).unwrap();
        assert!(back.labels().is_none());
    }

    #[test]
    fn load_rejects_meta_payload_shape_mismatch() {
        let ds = tiny_dataset();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path(), ViewFormat::Bin, "tiny").unwrap();
        // Corrupt the meta: declare 5 columns while payloads hold 4.
        let mut meta = read_meta(dir.path()).unwrap();
        meta.n = 5;
        fs::write(
            dir.path().join("meta.json"),
            serde_json::to_string(&meta).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            load_dataset(dir.path()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_missing_view_file_is_io_error() {
        let ds = tiny_dataset();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path(), ViewFormat::Bin, "tiny").unwrap();
        fs::remove_file(dir.path().join("view_1.bin")).unwrap();
        assert!(matches!(load_dataset(dir.path()), Err(Error::Io(_))));
    }

    #[test]
    fn flower17_shaped_metadata_loads_with_declared_counts() {
        // Counts taken from a published benchmark index: 1360 samples,
        // 7 views, 17 classes. Feature dims here are stand-ins.
        let (n, v_count, k) = (1360usize, 7usize, 17usize);
        let mut views = Vec::new();
        for v in 0..v_count {
            let data = DMatrix::from_fn(2 + v % 3, n, |i, j| (i + j + v) as f64 * 0.25);
            views.push(ViewMatrix::new(format!("feat{v}"), data).unwrap());
        }
        let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
        let ds = MultiViewDataset::new(views, Some(labels)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path(), ViewFormat::Bin, "flower17-shape").unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.n(), 1360);
        assert_eq!(back.n_views(), 7);
        assert_eq!(back.n_classes(), Some(17));
    }

    fn demo_spec(noise: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n: 60,
            views: 3,
            k_true: 5,
            latent_dim: 10,
            view_dims: vec![8, 6, 4],
            noise_sigma: noise,
            center_spread: 3.0,
            seed,
        }
    }

    #[test]
    fn zero_noise_makes_same_cluster_columns_identical() {
        let ds = generate_synthetic(&demo_spec(0.0, 3)).unwrap();
        let labels = ds.labels().unwrap().to_vec();
        for view in ds.views() {
            for i in 0..ds.n() {
                for j in (i + 1)..ds.n() {
                    if labels[i] == labels[j] {
                        let diff = (view.data.column(i) - view.data.column(j)).abs().max();
                        assert!(diff <= 1e-12, "same-cluster columns differ by {diff}");
                    }
                }
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_synthetic(&demo_spec(0.7, 7)).unwrap();
        let b = generate_synthetic(&demo_spec(0.7, 7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generator_rejects_n_below_k() {
        let mut spec = demo_spec(0.0, 1);
        spec.n = 3;
        assert!(matches!(
            generate_synthetic(&spec),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn round_robin_labels_are_balanced() {
        let ds = generate_synthetic(&demo_spec(0.2, 9)).unwrap();
        let labels = ds.labels().unwrap();
        let mut counts = vec![0usize; 5];
        for &l in labels {
            counts[l] += 1;
        }
        assert_eq!(counts, vec![12; 5]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn binary_codec_round_trips_bit_exactly(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = DMatrix::from_fn(rows, cols, |_, _| {
                let g: f64 = rng.sample(StandardNormal);
                g * 10f64.powi(rng.gen_range(-8..9))
            });
            let mut buf = Vec::new();
            write_view_bin(&mut buf, &m).unwrap();
            let back = read_view_bin(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(m, back);
        }

        #[test]
        fn csv_codec_round_trips_exactly(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = DMatrix::from_fn(rows, cols, |_, _| {
                let g: f64 = rng.sample(StandardNormal);
                g
            });
            let mut buf = Vec::new();
            write_view_csv(&mut buf, &m).unwrap();
            let back = read_view_csv(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(m, back);
        }
    }
}
