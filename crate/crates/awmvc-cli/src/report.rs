//! JSON report emitted by `awmvc run` (schema version 1).
//!
//! Everything except the two timing blocks (`timings`,
//! `fit.per_step_seconds`) is reproducible byte-for-byte given the same
//! inputs and seed.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool_version: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub fit: FitSummary,
    pub weights: WeightsReport,
    pub kmeans: KMeansSummary,
    /// Present only when the dataset carries ground-truth labels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    pub metric_variants: MetricVariants,
    pub timings: Timings,
}

#[derive(Serialize)]
pub struct ConfigEcho {
    pub clusters: usize,
    pub m: usize,
    pub dims: Vec<usize>,
    pub max_iter: usize,
    pub tol: f64,
    pub variant: String,
    pub alpha_rule: String,
    pub kmeans_restarts: usize,
    pub normalize: String,
    pub trace_evolution: bool,
}

#[derive(Serialize)]
pub struct DatasetSummary {
    pub name: String,
    pub n: usize,
    pub views: Vec<ViewSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_true: Option<usize>,
}

#[derive(Serialize)]
pub struct ViewSummary {
    pub name: String,
    pub d: usize,
}

#[derive(Serialize)]
pub struct FitSummary {
    pub iterations: usize,
    pub converged: bool,
    pub lower_bound: f64,
    pub objective_trace: Vec<f64>,
    pub alpha_trace: Vec<Vec<f64>>,
    pub beta_trace: Vec<Vec<f64>>,
    pub per_step_seconds: BTreeMap<String, f64>,
    /// Final consensus matrix, row-major (`k` rows of `n` values).
    pub consensus: Vec<Vec<f64>>,
}

/// Final weights in all three published forms, since plots of "dimension
/// weights" may refer to any of them.
#[derive(Serialize)]
pub struct WeightsReport {
    pub alpha: Vec<f64>,
    pub alpha_squared: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Serialize)]
pub struct KMeansSummary {
    pub best_sse: f64,
    pub restarts: usize,
}

/// Raw fractions in [0, 1]; the stderr summary prints percentages.
#[derive(Serialize)]
pub struct MetricsReport {
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
    pub fscore: f64,
}

/// Names the exact measure variants behind the numbers.
#[derive(Serialize)]
pub struct MetricVariants {
    pub nmi: String,
    pub fscore: String,
    pub alpha_rule: String,
}

#[derive(Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub fit_seconds: f64,
    pub kmeans_seconds: f64,
}
