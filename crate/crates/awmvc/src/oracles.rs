//! Independent reference implementations used by the test suites to check
//! the production code against a second route: a one-sided Jacobi SVD,
//! Gram-Schmidt samplers for feasible points, finite differences, and
//! exhaustive enumerations. Deliberately simple and slow; not part of the
//! public API and never called by the library itself.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Dense matrix of standard-normal draws in a fixed (column-major) order.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

/// Random matrix with orthonormal rows (`rows <= cols`), built by
/// modified Gram-Schmidt on Gaussian rows.
pub fn random_row_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    assert!(rows <= cols, "cannot have more orthonormal rows than columns");
    let mut m = random_matrix(rows, cols, rng);
    for i in 0..rows {
        for prev in 0..i {
            let proj: f64 = (0..cols).map(|c| m[(i, c)] * m[(prev, c)]).sum();
            for c in 0..cols {
                m[(i, c)] -= proj * m[(prev, c)];
            }
        }
        let norm: f64 = (0..cols).map(|c| m[(i, c)] * m[(i, c)]).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "degenerate Gaussian draw");
        for c in 0..cols {
            m[(i, c)] /= norm;
        }
    }
    m
}

/// Random matrix with orthonormal columns (`rows >= cols`).
pub fn random_col_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    random_row_orthonormal(cols, rows, rng).transpose()
}

/// Random nonnegative vector with unit L2 norm.
pub fn random_unit_nonneg(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..len)
            .map(|_| {
                let g: f64 = rng.sample(StandardNormal);
                g.abs()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}

/// One-sided Jacobi SVD of a tall matrix (`rows >= cols`).
/// Returns `(u, sigma, v)` with `a = u * diag(sigma) * vᵀ`, singular values
/// sorted descending. Columns of `u` for zero singular values are zero.
pub fn jacobi_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (m, n) = a.shape();
    assert!(m >= n, "jacobi oracle expects a tall matrix");
    let mut work = a.clone();
    let mut v = DMatrix::identity(n, n);
    let eps = 1e-15;
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    app += work[(i, p)] * work[(i, p)];
                    aqq += work[(i, q)] * work[(i, q)];
                    apq += work[(i, p)] * work[(i, q)];
                }
                if apq == 0.0 || apq.abs() <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let wp = work[(i, p)];
                    let wq = work[(i, q)];
                    work[(i, p)] = c * wp - s * wq;
                    work[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..n).map(|j| (work.column(j).norm(), j)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut u = DMatrix::zeros(m, n);
    let mut v_sorted = DMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (new_j, &(s, old_j)) in order.iter().enumerate() {
        sigma.push(s);
        if s > 0.0 {
            for i in 0..m {
                u[(i, new_j)] = work[(i, old_j)] / s;
            }
        }
        for i in 0..n {
            v_sorted[(i, new_j)] = v[(i, old_j)];
        }
    }
    (u, sigma, v_sorted)
}

/// Singular values of a tall matrix via the Jacobi oracle, descending.
pub fn jacobi_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    jacobi_svd(a).1
}

/// Plain-loop `||x - h z||_F^2`, written without matrix ops on purpose.
pub fn reconstruction_sq_error(x: &DMatrix<f64>, h: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            let mut hz = 0.0;
            for t in 0..h.ncols() {
                hz += h[(i, t)] * z[(t, j)];
            }
            let d = x[(i, j)] - hz;
            total += d * d;
        }
    }
    total
}

/// Max absolute entry of the central-difference gradient of
/// `f(h) = ||x - h z||_F^2` at `h` (relative step 1e-6).
pub fn fd_gradient_max_abs(x: &DMatrix<f64>, h: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    let mut max_abs = 0.0f64;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            let step = 1e-6 * h[(i, j)].abs().max(1.0);
            let mut hp = h.clone();
            hp[(i, j)] += step;
            let mut hm = h.clone();
            hm[(i, j)] -= step;
            let g = (reconstruction_sq_error(x, &hp, z) - reconstruction_sq_error(x, &hm, z))
                / (2.0 * step);
            max_abs = max_abs.max(g.abs());
        }
    }
    max_abs
}

/// Within-cluster sum of squared distances for a fixed assignment of the
/// columns of `points` (centroids are the cluster means).
pub fn partition_sse(points: &DMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let dim = points.nrows();
    let mut sums = vec![vec![0.0f64; dim]; k];
    let mut counts = vec![0usize; k];
    for (j, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for i in 0..dim {
            sums[l][i] += points[(i, j)];
        }
    }
    let mut sse = 0.0;
    for (j, &l) in labels.iter().enumerate() {
        for i in 0..dim {
            let mean = sums[l][i] / counts[l] as f64;
            let d = points[(i, j)] - mean;
            sse += d * d;
        }
    }
    sse
}

/// Global minimum SSE over all assignments into at most `k` clusters,
/// by exhaustive enumeration. Only for tiny instances.
pub fn exhaustive_min_sse(points: &DMatrix<f64>, k: usize) -> f64 {
    let n = points.ncols();
    assert!(
        (k as f64).powi(n as i32) <= 2e7,
        "instance too large for exhaustive enumeration"
    );
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let sse = partition_sse(points, &labels, k);
        if sse < best {
            best = sse;
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            labels[i] += 1;
            if labels[i] == k {
                labels[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Maximum total value over all one-to-one matchings of `min(a, b)` rows to
/// columns, by brute-force recursion. Only for tiny instances.
pub fn exhaustive_max_matching(values: &DMatrix<f64>) -> f64 {
    if values.nrows() > values.ncols() {
        return exhaustive_max_matching(&values.transpose());
    }
    fn recurse(values: &DMatrix<f64>, row: usize, used: &mut Vec<bool>) -> f64 {
        if row == values.nrows() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for col in 0..values.ncols() {
            if used[col] {
                continue;
            }
            used[col] = true;
            let total = values[(row, col)] + recurse(values, row + 1, used);
            used[col] = false;
            if total > best {
                best = total;
            }
        }
        best
    }
    let mut used = vec![false; values.ncols()];
    recurse(values, 0, &mut used)
}

/// Clustering accuracy by brute-force maximum matching on the contingency
/// counts. Only for small numbers of clusters/classes.
pub fn exhaustive_acc(pred: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    let mut counts: HashMap<(usize, usize), f64> = HashMap::new();
    for (&p, &t) in pred.iter().zip(truth) {
        *counts.entry((p, t)).or_insert(0.0) += 1.0;
    }
    let kp = pred.iter().max().unwrap() + 1;
    let kt = truth.iter().max().unwrap() + 1;
    let mut m = DMatrix::zeros(kp, kt);
    for ((p, t), c) in counts {
        m[(p, t)] = c;
    }
    exhaustive_max_matching(&m) / pred.len() as f64
}

/// Pairwise F-measure by literal enumeration of all sample pairs.
pub fn pairwise_fscore(pred: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    let n = pred.len();
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for i in 0..n {
        for j in (i + 1)..n {
            let same_cluster = pred[i] == pred[j];
            let same_class = truth[i] == truth[j];
            match (same_cluster, same_class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}
