//! External clustering evaluation: accuracy under optimal cluster-to-class
//! matching, normalized mutual information, purity, and pairwise F-score.
//! All four are invariant to relabeling either partition.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Joint counts of (predicted cluster, true class), the shared substrate
/// for all four measures.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl ContingencyTable {
    /// Builds the table from two equal-length label sequences. Labels may
    /// be any usize values; they are compacted internally in
    /// first-occurrence order (metrics are relabel-invariant anyway).
    pub fn from_labels(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::validation(format!(
                "label lengths differ: {} vs {}",
                pred.len(),
                truth.len()
            )));
        }
        if pred.is_empty() {
            return Err(Error::validation("cannot score empty label sequences"));
        }
        let pred = compact(pred);
        let truth = compact(truth);
        let kp = pred.iter().max().unwrap() + 1;
        let kt = truth.iter().max().unwrap() + 1;
        let mut counts = vec![vec![0u64; kt]; kp];
        for (&p, &t) in pred.iter().zip(&truth) {
            counts[p][t] += 1;
        }
        Ok(Self {
            counts,
            n: pred.len() as u64,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        let kt = self.counts[0].len();
        let mut sums = vec![0u64; kt];
        for row in &self.counts {
            for (j, &c) in row.iter().enumerate() {
                sums[j] += c;
            }
        }
        sums
    }
}

fn compact(labels: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|&l| match order.iter().position(|&o| o == l) {
            Some(idx) => idx,
            None => {
                order.push(l);
                order.len() - 1
            }
        })
        .collect()
}

/// Maximum-total-value one-to-one assignment of `min(a, b)` (row, column)
/// pairs, via shortest augmenting paths with potentials on a zero-padded
/// square cost matrix. O(max(a,b)^3).
pub fn hungarian_max(values: &DMatrix<f64>) -> Vec<(usize, usize)> {
    assert!(
        values.iter().all(|x| x.is_finite()),
        "assignment values must be finite"
    );
    let (a, b) = values.shape();
    if a == 0 || b == 0 {
        return Vec::new();
    }
    let s = a.max(b);
    let cost = |i: usize, j: usize| -> f64 {
        if i < a && j < b {
            -values[(i, j)]
        } else {
            0.0
        }
    };

    const NONE: usize = usize::MAX;
    let mut u = vec![0.0f64; s]; // row potentials
    let mut v = vec![0.0f64; s + 1]; // column potentials (s = virtual column)
    let mut match_col = vec![NONE; s + 1]; // column -> row

    for row in 0..s {
        let mut minv = vec![f64::INFINITY; s + 1];
        let mut way = vec![s; s + 1];
        let mut used = vec![false; s + 1];
        let mut j0 = s;
        match_col[s] = row;
        loop {
            used[j0] = true;
            let i0 = match_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = s;
            for j in 0..s {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=s {
                if used[j] {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if match_col[j0] == NONE {
                break;
            }
        }
        // Augment along the alternating path back to the virtual column.
        loop {
            let j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
            if j0 == s {
                break;
            }
        }
        match_col[s] = NONE;
    }

    let mut pairs: Vec<(usize, usize)> = (0..s)
        .filter(|&j| j < b && match_col[j] != NONE && match_col[j] < a)
        .map(|j| (match_col[j], j))
        .collect();
    pairs.sort_unstable();
    debug_assert_eq!(pairs.len(), a.min(b));
    pairs
}

/// Clustering accuracy: matched sample fraction under the best one-to-one
/// cluster-to-class assignment.
pub fn acc(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::from_labels(pred, truth)?;
    let values = DMatrix::from_fn(table.counts.len(), table.counts[0].len(), |i, j| {
        table.counts[i][j] as f64
    });
    let matched: f64 = hungarian_max(&values)
        .into_iter()
        .map(|(i, j)| table.counts[i][j] as f64)
        .sum();
    Ok(matched / table.n as f64)
}

/// Normalized mutual information `I(pred; truth) / sqrt(H(pred) H(truth))`
/// with natural-log entropies. Conventions for degenerate partitions: both
/// constant -> 1, exactly one constant -> 0.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::from_labels(pred, truth)?;
    let n = table.n as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let entropy = |sums: &[u64]| -> f64 {
        sums.iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_pred = entropy(&rows);
    let h_truth = entropy(&cols);
    if h_pred == 0.0 && h_truth == 0.0 {
        return Ok(1.0);
    }
    if h_pred == 0.0 || h_truth == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let joint = c as f64 / n;
            mi += joint * ((n * c as f64) / (rows[i] as f64 * cols[j] as f64)).ln();
        }
    }
    Ok((mi / (h_pred * h_truth).sqrt()).clamp(0.0, 1.0))
}

/// Purity: average dominant-class fraction over predicted clusters.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::from_labels(pred, truth)?;
    let dominant: u64 = table
        .counts
        .iter()
        .map(|row| row.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(dominant as f64 / table.n as f64)
}

/// Pairwise F-measure over all sample pairs, computed from contingency
/// combinatorics (TP = same-cluster & same-class pairs, and so on).
/// Returns 0 when there are no true-positive pairs.
pub fn fscore(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::from_labels(pred, truth)?;
    let choose2 = |x: u64| x * x.saturating_sub(1) / 2;
    let tp: u64 = table
        .counts
        .iter()
        .flat_map(|row| row.iter().map(|&c| choose2(c)))
        .sum();
    let same_cluster: u64 = table.row_sums().into_iter().map(choose2).sum();
    let same_class: u64 = table.col_sums().into_iter().map(choose2).sum();
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / same_cluster as f64;
    let recall = tp as f64 / same_class as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}
