//! k-means on the consensus columns: k-means++ seeding, Lloyd iterations
//! with empty-cluster repair, and best-of-restarts selection.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansConfig {
    pub k: usize,
    /// Independent seeded restarts; the lowest-SSE one wins.
    pub restarts: usize,
    pub max_lloyd_iters: usize,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            restarts: 50,
            max_lloyd_iters: 100,
            seed: 0,
        }
    }
}

/// Hard assignment of every sample plus its within-cluster sum of squared
/// distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub labels: Vec<usize>,
    pub sse: f64,
    pub restarts_run: usize,
}

/// Sub-seed for one restart, derived so that running restarts in parallel
/// or sequentially (or re-running one in isolation) gives identical draws.
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 over (seed, index)
    let mut x = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Clusters the columns of `points` (`dim × n`). Runs `cfg.restarts`
/// independent k-means++ seeded Lloyd optimizations and returns the
/// assignment with minimal SSE (ties broken by restart index).
pub fn kmeans(points: &DMatrix<f64>, cfg: &KMeansConfig) -> Result<Assignment> {
    validate(points, cfg.k)?;
    if cfg.restarts == 0 {
        return Err(Error::validation("restarts must be positive"));
    }
    let runs: Vec<Assignment> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| kmeans_single_restart(points, cfg.k, restart_seed(cfg.seed, i), cfg.max_lloyd_iters))
        .collect();
    let best_idx = runs
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.sse.partial_cmp(&b.sse).unwrap().then(ia.cmp(ib)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let mut best = runs.into_iter().nth(best_idx).expect("index in range");
    best.restarts_run = cfg.restarts;
    Ok(best)
}

/// One k-means++ seeded Lloyd run. Exposed so selection correctness can be
/// checked restart-by-restart.
pub fn kmeans_single_restart(
    points: &DMatrix<f64>,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroids = plus_plus_seed(points, k, &mut rng);
    let (labels, sse, _) = lloyd(points, centroids, max_iters);
    Assignment {
        labels,
        sse,
        restarts_run: 1,
    }
}

/// Lloyd iterations from explicit initial centroids (`dim × k` columns).
/// Useful for deterministic equivariance checks.
pub fn lloyd_from_centroids(
    points: &DMatrix<f64>,
    centroids: &DMatrix<f64>,
    max_iters: usize,
) -> Result<Assignment> {
    validate(points, centroids.ncols())?;
    if centroids.nrows() != points.nrows() {
        return Err(Error::validation("centroid dimension does not match points"));
    }
    let (labels, sse, _) = lloyd(points, centroids.clone(), max_iters);
    Ok(Assignment {
        labels,
        sse,
        restarts_run: 1,
    })
}

fn validate(points: &DMatrix<f64>, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::validation("k must be positive"));
    }
    if points.ncols() < k {
        return Err(Error::validation(format!(
            "cannot form {k} clusters from {} points",
            points.ncols()
        )));
    }
    if !points.iter().all(|x| x.is_finite()) {
        return Err(Error::validation("points contain non-finite entries"));
    }
    Ok(())
}

fn dist_sq(points: &DMatrix<f64>, j: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    let mut d = 0.0;
    for i in 0..points.nrows() {
        let diff = points[(i, j)] - centroids[(i, c)];
        d += diff * diff;
    }
    d
}

/// k-means++ seeding: first center uniform, the rest drawn with probability
/// proportional to the squared distance to the nearest chosen center.
fn plus_plus_seed(points: &DMatrix<f64>, k: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let n = points.ncols();
    let mut centroids = DMatrix::zeros(points.nrows(), k);
    let first = rng.gen_range(0..n);
    centroids.set_column(0, &points.column(first));
    let mut d2: Vec<f64> = (0..n).map(|j| dist_sq(points, j, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (j, &w) in d2.iter().enumerate() {
                if u < w {
                    chosen = j;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            // All remaining mass is on duplicates of chosen centers.
            rng.gen_range(0..n)
        };
        centroids.set_column(c, &points.column(pick));
        for (j, d) in d2.iter_mut().enumerate() {
            let cand = dist_sq(points, j, &centroids, c);
            if cand < *d {
                *d = cand;
            }
        }
    }
    centroids
}

/// Assignment step: nearest centroid, ties to the lowest cluster index.
fn assign(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize]) {
    for j in 0..points.ncols() {
        let mut best = 0;
        let mut best_d = dist_sq(points, j, centroids, 0);
        for c in 1..centroids.ncols() {
            let d = dist_sq(points, j, centroids, c);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        labels[j] = best;
    }
}

fn sse_of(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &[usize]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(j, &c)| dist_sq(points, j, centroids, c))
        .sum()
}

/// Runs Lloyd iterations until assignments stop changing or `max_iters` is
/// hit. Returns labels, final SSE, and the per-iteration SSE trace.
fn lloyd(
    points: &DMatrix<f64>,
    mut centroids: DMatrix<f64>,
    max_iters: usize,
) -> (Vec<usize>, f64, Vec<f64>) {
    let n = points.ncols();
    let k = centroids.ncols();
    let dim = points.nrows();
    let mut labels = vec![0usize; n];
    let mut prev = vec![usize::MAX; n];
    let mut trace = Vec::new();
    for _ in 0..max_iters.max(1) {
        assign(points, &centroids, &mut labels);
        trace.push(sse_of(points, &centroids, &labels));
        if labels == prev {
            break;
        }
        prev.copy_from_slice(&labels);

        // Update step: means, with empty clusters re-seeded at the point
        // farthest from its assigned centroid.
        let mut counts = vec![0usize; k];
        let mut sums: DMatrix<f64> = DMatrix::zeros(dim, k);
        for (j, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for i in 0..dim {
                sums[(i, c)] += points[(i, j)];
            }
        }
        let mut claimed: Vec<usize> = Vec::new();
        for c in 0..k {
            if counts[c] > 0 {
                for i in 0..dim {
                    centroids[(i, c)] = sums[(i, c)] / counts[c] as f64;
                }
            } else {
                let mut far_j = None;
                let mut far_d = -1.0;
                for j in 0..n {
                    if claimed.contains(&j) {
                        continue;
                    }
                    let d = dist_sq(points, j, &centroids, labels[j]);
                    if d > far_d {
                        far_d = d;
                        far_j = Some(j);
                    }
                }
                if let Some(j) = far_j {
                    claimed.push(j);
                    centroids.set_column(c, &points.column(j));
                }
            }
        }
    }
    // Final SSE against the means of the final assignment.
    let mut counts = vec![0usize; k];
    let mut sums: DMatrix<f64> = DMatrix::zeros(dim, k);
    for (j, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        for i in 0..dim {
            sums[(i, c)] += points[(i, j)];
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            for i in 0..dim {
                centroids[(i, c)] = sums[(i, c)] / counts[c] as f64;
            }
        }
    }
    let sse = sse_of(points, &centroids, &labels);
    (labels, sse, trace)
}
