//! The alternating optimizer: six closed-form update steps over the base
//! matrices, consensus matrix, rotations, coefficient matrices, and the two
//! weight vectors, looped until the objective stalls.
//!
//! One sweep runs, in order: base matrices `H`, consensus `M`, rotations
//! `W`, coefficients `Z`, embedding weights `alpha`, alignment weights
//! `beta`. Every step is the exact minimizer (or maximizer) of its
//! subproblem, so the objective never increases within a sweep; the trace
//! is bounded below by `-sum_p k*sqrt(d_p)`, which gives convergence.

mod procrustes;

pub use procrustes::procrustes_max_trace_rows;

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};

/// Residuals at or below this threshold are treated as exact fits when
/// re-weighting the embeddings.
pub const RESIDUAL_EPS: f64 = 1e-12;

/// Which re-weighting rule the alpha step applies.
///
/// `Reciprocal` weights by inverse residual, `1/r_p` (the default);
/// `Kkt` by inverse squared residual, `1/r_p^2`, which is the exact KKT
/// minimizer of the weighted residual sum over the simplex and therefore
/// guarantees a monotone objective for that step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaRule {
    #[default]
    Reciprocal,
    Kkt,
}

/// Ablation switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// The full method: `m` embedding dimensions, auto-weighted.
    #[default]
    Full,
    /// Single embedding at dimension `k` (drops the multi-dimension map).
    FixedDim,
    /// Uniform alpha frozen at `1/m` (drops the reconstruction weighting).
    EqualAlpha,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Cluster count `k`.
    pub k: usize,
    /// Number of embedding dimensions per view.
    pub m: usize,
    /// Embedding dimensions `d_p`; each must satisfy `k <= d_p <= n`.
    pub dims: Vec<usize>,
    pub max_iter: usize,
    /// Relative tolerance on the objective decrease.
    pub tol: f64,
    pub seed: u64,
    pub variant: Variant,
    pub alpha_rule: AlphaRule,
}

impl SolverConfig {
    /// Defaults: `m = 3` with dimensions `k, 2k, 3k`, 50 sweeps max,
    /// tolerance 1e-6.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            m: 3,
            dims: (1..=3).map(|p| p * k).collect(),
            max_iter: 50,
            tol: 1e-6,
            seed: 0,
            variant: Variant::Full,
            alpha_rule: AlphaRule::Reciprocal,
        }
    }

    /// Sets the embedding count and resets dims to `k, 2k, ..., mk`.
    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self.dims = (1..=m).map(|p| p * self.k).collect();
        self
    }

    /// Applies the variant coercion (FixedDim forces `m = 1`, `dims = [k]`)
    /// and validates the result against the dataset.
    pub fn resolved(&self, ds: &MultiViewDataset) -> Result<SolverConfig> {
        let mut cfg = self.clone();
        if cfg.variant == Variant::FixedDim {
            cfg.m = 1;
            cfg.dims = vec![cfg.k];
        }
        if cfg.k == 0 || cfg.m == 0 || cfg.max_iter == 0 {
            return Err(Error::validation("k, m, and max_iter must be positive"));
        }
        if !(cfg.tol > 0.0) {
            return Err(Error::validation("tol must be positive"));
        }
        if cfg.dims.len() != cfg.m {
            return Err(Error::validation(format!(
                "dims has {} entries, expected m = {}",
                cfg.dims.len(),
                cfg.m
            )));
        }
        let n = ds.n();
        if cfg.k > n {
            return Err(Error::validation(format!(
                "k = {} exceeds sample count n = {n}",
                cfg.k
            )));
        }
        for &d in &cfg.dims {
            if d < cfg.k || d > n {
                return Err(Error::validation(format!(
                    "embedding dimension {d} outside [k = {}, n = {n}]",
                    cfg.k
                )));
            }
        }
        Ok(cfg)
    }
}

/// All optimization variables.
///
/// `h` and `m` start out unset; the first sweep computes them before any
/// step reads them. Shapes: `h[p][v]` is `d_v × d_p`, `z[p]` is `d_p × n`
/// (orthonormal rows), `w[p]` is `d_p × k` (orthonormal columns), `m` is
/// `k × n` (orthonormal rows).
#[derive(Debug, Clone)]
pub struct SolverState {
    pub h: Option<Vec<Vec<DMatrix<f64>>>>,
    pub z: Vec<DMatrix<f64>>,
    pub w: Vec<DMatrix<f64>>,
    pub m: Option<DMatrix<f64>>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl SolverState {
    fn h_ref(&self) -> &Vec<Vec<DMatrix<f64>>> {
        self.h.as_ref().expect("base matrices not computed yet; run update_h first")
    }

    fn m_ref(&self) -> &DMatrix<f64> {
        self.m.as_ref().expect("consensus not computed yet; run update_m first")
    }
}

/// Everything recorded while fitting.
#[derive(Debug, Clone)]
pub struct FitReport {
    /// Objective value after each full sweep.
    pub objective_trace: Vec<f64>,
    /// Alpha after each sweep (row per iteration).
    pub alpha_trace: Vec<Vec<f64>>,
    /// Beta after each sweep.
    pub beta_trace: Vec<Vec<f64>>,
    pub alpha_final: Vec<f64>,
    pub beta_final: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Cumulative wall seconds per update step.
    pub per_step_seconds: BTreeMap<String, f64>,
    /// Final consensus matrix (`k × n`).
    pub consensus: DMatrix<f64>,
    /// `-sum_p k*sqrt(d_p)`; every trace entry stays above this.
    pub lower_bound: f64,
}

/// `-sum_p k*sqrt(d_p)`, the proven floor of the objective.
pub fn objective_lower_bound(k: usize, dims: &[usize]) -> f64 {
    -(dims.iter().map(|&d| k as f64 * (d as f64).sqrt()).sum::<f64>())
}

fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

/// Orthonormalizes the rows of a `d × n` Gaussian draw (`d <= n`) via QR of
/// the transpose, sign-fixed on the R diagonal for a Haar-like spread.
fn row_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = gaussian(cols, rows, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..rows {
        if r[(j, j)] < 0.0 {
            for i in 0..cols {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q.transpose()
}

fn col_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    row_orthonormal(cols, rows, rng).transpose()
}

/// Fresh state: `z_p` row-orthonormal, `w_p` column-orthonormal (both from
/// seeded Gaussians), `alpha = 1/m`, `beta = 1/sqrt(m)`, `h`/`m` unset.
pub fn init_state(
    cfg: &SolverConfig,
    ds: &MultiViewDataset,
    rng: &mut impl Rng,
) -> Result<SolverState> {
    let cfg = cfg.resolved(ds)?;
    let n = ds.n();
    let z = cfg.dims.iter().map(|&d| row_orthonormal(d, n, rng)).collect();
    let w = cfg.dims.iter().map(|&d| col_orthonormal(d, cfg.k, rng)).collect();
    Ok(SolverState {
        h: None,
        z,
        w,
        m: None,
        alpha: vec![1.0 / cfg.m as f64; cfg.m],
        beta: vec![1.0 / (cfg.m as f64).sqrt(); cfg.m],
    })
}

/// `h[p][v] = X_v zᵀ_p`, the unconstrained minimizer of the reconstruction
/// error given row-orthonormal `z_p`.
pub fn update_h(state: &mut SolverState, ds: &MultiViewDataset) {
    let grid = state
        .z
        .iter()
        .map(|z| {
            ds.views()
                .iter()
                .map(|view| &view.data * z.transpose())
                .collect()
        })
        .collect();
    state.h = Some(grid);
}

/// Consensus step: stacks `A = sum_p beta_p zᵀ_p w_p` and maximizes
/// `trace(M A)` over row-orthonormal `M`. Returns true when `A` is
/// (numerically) zero, in which case every feasible `M` is optimal and the
/// SVD-derived one is kept.
pub fn update_m(state: &mut SolverState) -> Result<bool> {
    let (n, k) = (state.z[0].ncols(), state.w[0].ncols());
    let mut a = DMatrix::zeros(n, k);
    for (p, z) in state.z.iter().enumerate() {
        a += z.transpose() * &state.w[p] * state.beta[p];
    }
    let degenerate = a.norm() <= 1e-12;
    state.m = Some(procrustes_max_trace_rows(&a)?);
    Ok(degenerate)
}

/// Rotation step: per `p`, maximizes `trace(wᵀ_p z_p mᵀ)` over
/// column-orthonormal `w_p`.
pub fn update_w(state: &mut SolverState) -> Result<()> {
    let m = state.m.as_ref().expect("consensus not computed yet; run update_m first");
    let mut w = Vec::with_capacity(state.z.len());
    for z in &state.z {
        let g = z * m.transpose();
        w.push(procrustes_max_trace_rows(&g)?.transpose());
    }
    state.w = w;
    Ok(())
}

/// Coefficient step: per `p`, maximizes `trace(z_p B_p)` with
/// `B_p = alpha_p^2 sum_v Xᵀ_v h[p][v] + beta_p mᵀ wᵀ_p` over
/// row-orthonormal `z_p`. This is the reduced form of minimizing the
/// combined reconstruction-plus-alignment subproblem, since the quadratic
/// term is constant on the feasible set.
pub fn update_z(state: &mut SolverState, ds: &MultiViewDataset) -> Result<()> {
    let h = state.h.as_ref().expect("base matrices not computed yet; run update_h first");
    let m = state.m.as_ref().expect("consensus not computed yet; run update_m first");
    let n = ds.n();
    let mut z_new = Vec::with_capacity(state.z.len());
    for (p, z) in state.z.iter().enumerate() {
        let d = z.nrows();
        let a2 = state.alpha[p] * state.alpha[p];
        let mut b = DMatrix::zeros(n, d);
        for (v, view) in ds.views().iter().enumerate() {
            b += view.data.transpose() * &h[p][v] * a2;
        }
        b += m.transpose() * state.w[p].transpose() * state.beta[p];
        z_new.push(procrustes_max_trace_rows(&b)?);
    }
    state.z = z_new;
    Ok(())
}

/// Per-dimension reconstruction residuals
/// `r_p = sqrt(sum_v ||X_v - h[p][v] z_p||_F^2)`.
pub fn residuals(state: &SolverState, ds: &MultiViewDataset) -> Vec<f64> {
    let h = state.h_ref();
    state
        .z
        .iter()
        .enumerate()
        .map(|(p, z)| {
            let sq: f64 = ds
                .views()
                .iter()
                .enumerate()
                .map(|(v, view)| (&view.data - &h[p][v] * z).norm_squared())
                .sum();
            sq.sqrt()
        })
        .collect()
}

/// Closed-form simplex weights from residuals. Zero residuals (within
/// [`RESIDUAL_EPS`]) take the limit behavior: uniform mass over the exact
/// fits, zero elsewhere.
pub fn alpha_from_residuals(r: &[f64], rule: AlphaRule) -> Vec<f64> {
    let zero: Vec<usize> = (0..r.len()).filter(|&p| r[p] <= RESIDUAL_EPS).collect();
    if !zero.is_empty() {
        let share = 1.0 / zero.len() as f64;
        let mut alpha = vec![0.0; r.len()];
        for p in zero {
            alpha[p] = share;
        }
        return alpha;
    }
    let weights: Vec<f64> = r
        .iter()
        .map(|&rp| match rule {
            AlphaRule::Reciprocal => 1.0 / rp,
            AlphaRule::Kkt => 1.0 / (rp * rp),
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Recomputes the embedding weights from the current residuals.
pub fn update_alpha(state: &mut SolverState, ds: &MultiViewDataset, rule: AlphaRule) {
    let r = residuals(state, ds);
    state.alpha = alpha_from_residuals(&r, rule);
}

/// Alignment scores `theta_p = trace(zᵀ_p w_p m)`.
pub fn thetas(state: &SolverState) -> Vec<f64> {
    let m = state.m_ref();
    state
        .z
        .iter()
        .enumerate()
        .map(|(p, z)| (z * m.transpose()).dot(&state.w[p]))
        .collect()
}

/// Unit-sphere weights maximizing `sum_p beta_p theta_p` over `beta >= 0`.
/// Negative scores are clamped to zero (they cannot help); if every score
/// clamps, falls back to uniform `1/sqrt(m)`.
pub fn beta_from_theta(theta: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = theta.iter().map(|&t| t.max(0.0)).collect();
    let norm = clamped.iter().map(|t| t * t).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return vec![1.0 / (theta.len() as f64).sqrt(); theta.len()];
    }
    clamped.into_iter().map(|t| t / norm).collect()
}

/// Recomputes the alignment weights from the current scores.
pub fn update_beta(state: &mut SolverState) {
    let th = thetas(state);
    state.beta = beta_from_theta(&th);
}

/// The full objective:
/// `sum_p sum_v alpha_p^2/2 ||X_v - h[p][v] z_p||_F^2 - sum_p beta_p theta_p`.
///
/// Panics if `h` or `m` have not been computed yet.
pub fn objective(state: &SolverState, ds: &MultiViewDataset) -> f64 {
    let r = residuals(state, ds);
    let th = thetas(state);
    objective_from_parts(&state.alpha, &r, &state.beta, &th)
}

fn objective_from_parts(alpha: &[f64], r: &[f64], beta: &[f64], theta: &[f64]) -> f64 {
    let recon: f64 = alpha
        .iter()
        .zip(r)
        .map(|(&a, &rp)| 0.5 * a * a * rp * rp)
        .sum();
    let align: f64 = beta.iter().zip(theta).map(|(&b, &t)| b * t).sum();
    recon - align
}

/// Runs the alternating optimization to convergence.
pub fn fit(cfg: &SolverConfig, ds: &MultiViewDataset) -> Result<(SolverState, FitReport)> {
    fit_observed(cfg, ds, &mut |_, _| {})
}

/// [`fit`] with a per-sweep observer, called after each sweep's weight
/// updates with the 1-based sweep index and the current state.
pub fn fit_observed(
    cfg: &SolverConfig,
    ds: &MultiViewDataset,
    observe: &mut dyn FnMut(usize, &SolverState),
) -> Result<(SolverState, FitReport)> {
    let cfg = cfg.resolved(ds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = init_state(&cfg, ds, &mut rng)?;

    let mut seconds: BTreeMap<String, f64> = BTreeMap::new();
    let mut objective_trace: Vec<f64> = Vec::new();
    let mut alpha_trace = Vec::new();
    let mut beta_trace = Vec::new();
    let mut converged = false;

    macro_rules! timed {
        ($name:literal, $body:expr) => {{
            let start = Instant::now();
            let out = $body;
            *seconds.entry($name.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
            out
        }};
    }

    for sweep in 1..=cfg.max_iter {
        timed!("update_h", update_h(&mut state, ds));
        timed!("update_m", update_m(&mut state))?;
        timed!("update_w", update_w(&mut state))?;
        timed!("update_z", update_z(&mut state, ds))?;
        let r = timed!("update_alpha", {
            let r = residuals(&state, ds);
            if cfg.variant != Variant::EqualAlpha {
                state.alpha = alpha_from_residuals(&r, cfg.alpha_rule);
            }
            r
        });
        let th = timed!("update_beta", {
            let th = thetas(&state);
            state.beta = beta_from_theta(&th);
            th
        });

        let obj = objective_from_parts(&state.alpha, &r, &state.beta, &th);
        if !obj.is_finite() {
            return Err(Error::numeric(format!(
                "objective became non-finite at sweep {sweep}"
            )));
        }
        let prev = objective_trace.last().copied();
        objective_trace.push(obj);
        alpha_trace.push(state.alpha.clone());
        beta_trace.push(state.beta.clone());
        observe(sweep, &state);

        if let Some(prev) = prev {
            if (prev - obj).abs() <= cfg.tol * (1.0 + obj.abs()) {
                converged = true;
                break;
            }
        }
    }

    let report = FitReport {
        iterations: objective_trace.len(),
        converged,
        alpha_final: state.alpha.clone(),
        beta_final: state.beta.clone(),
        consensus: state.m.clone().expect("at least one sweep ran"),
        lower_bound: objective_lower_bound(cfg.k, &cfg.dims),
        objective_trace,
        alpha_trace,
        beta_trace,
        per_step_seconds: seconds,
    };
    Ok((state, report))
}
