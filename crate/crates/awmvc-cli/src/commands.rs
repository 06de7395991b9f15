//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::time::Instant;

use awmvc::clustering::{kmeans, KMeansConfig};
use awmvc::dataset::{
    self, generate_synthetic, load_dataset, read_meta, remap_labels, save_dataset, SyntheticSpec,
    ViewFormat,
};
use awmvc::metrics;
use awmvc::solver::{fit_observed, AlphaRule, SolverConfig, Variant};
use awmvc::{Error, Result};

use crate::report::*;
use crate::{BenchArgs, EvalArgs, FormatArg, GenArgs, NormalizeArg, RunArgs};

/// Default per-view feature dimensions: 30 + 10*(views-1-v), so three views
/// get 50,40,30.
fn default_view_dims(views: usize) -> Vec<usize> {
    (0..views).map(|v| 30 + 10 * (views - 1 - v)).collect()
}

fn synthetic_spec(
    n: usize,
    views: usize,
    clusters: usize,
    latent_dim: usize,
    view_dims: Option<Vec<usize>>,
    noise_sigma: f64,
    center_spread: f64,
    seed: u64,
) -> SyntheticSpec {
    SyntheticSpec {
        n,
        views,
        k_true: clusters,
        latent_dim,
        view_dims: view_dims.unwrap_or_else(|| default_view_dims(views)),
        noise_sigma,
        center_spread,
        seed,
    }
}

pub fn gen(args: GenArgs) -> Result<()> {
    let spec = synthetic_spec(
        args.n,
        args.views,
        args.clusters,
        args.latent_dim,
        args.view_dims,
        args.noise_sigma,
        args.center_spread,
        args.seed,
    );
    let ds = generate_synthetic(&spec)?;
    let format = match args.format {
        FormatArg::Csv => ViewFormat::Csv,
        FormatArg::Bin => ViewFormat::Bin,
    };
    save_dataset(&ds, &args.out, format, &args.name)?;
    eprintln!(
        "wrote '{}' to {}: n={}, views={}, clusters={}",
        args.name,
        args.out.display(),
        ds.n(),
        ds.n_views(),
        args.clusters
    );
    Ok(())
}

/// Resolves `--m`/`--dims` into a consistent pair, defaulting to m=3 with
/// dims k,2k,...,mk.
fn resolve_dims(k: usize, m: Option<usize>, dims: Option<Vec<usize>>) -> Result<(usize, Vec<usize>)> {
    match (m, dims) {
        (None, None) => Ok((3, (1..=3).map(|p| p * k).collect())),
        (Some(m), None) => Ok((m, (1..=m).map(|p| p * k).collect())),
        (None, Some(d)) => Ok((d.len(), d)),
        (Some(m), Some(d)) => {
            if d.len() != m {
                return Err(Error::validation(format!(
                    "--dims lists {} dimensions but --m is {m}",
                    d.len()
                )));
            }
            Ok((m, d))
        }
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Full => "full",
        Variant::FixedDim => "fixed-dim",
        Variant::EqualAlpha => "equal-alpha",
    }
}

/// Echo string for reports: the CLI tokens, so published numbers state the
/// exact rule they were produced with.
fn alpha_rule_name(r: AlphaRule) -> &'static str {
    match r {
        AlphaRule::Reciprocal => "paper",
        AlphaRule::Kkt => "kkt",
    }
}

pub fn run(args: RunArgs) -> Result<()> {
    let total_start = Instant::now();
    let meta = read_meta(&args.data)?;
    let mut ds = load_dataset(&args.data)?;
    if args.normalize == NormalizeArg::PerSampleL2 {
        ds.normalize_per_sample_l2();
    }

    let k = match (args.clusters, ds.n_classes()) {
        (Some(k), _) => k,
        (None, Some(k)) => k,
        (None, None) => {
            return Err(Error::validation(
                "--clusters is required when the dataset has no labels",
            ))
        }
    };
    let (m, dims) = resolve_dims(k, args.m, args.dims.clone())?;
    let cfg = SolverConfig {
        k,
        m,
        dims,
        max_iter: args.max_iter,
        tol: args.tol,
        seed: args.seed,
        variant: args.variant.into(),
        alpha_rule: args.alpha_rule.into(),
    };
    let kcfg = KMeansConfig {
        k,
        restarts: args.kmeans_restarts,
        max_lloyd_iters: 100,
        seed: args.seed,
    };

    if args.trace_evolution && ds.labels().is_none() {
        return Err(Error::validation(
            "--trace-evolution needs ground-truth labels in the dataset",
        ));
    }

    // Per-sweep clustering accuracy of the consensus, when asked for.
    let mut evolution_acc: Vec<f64> = Vec::new();
    let fit_start = Instant::now();
    let (_, report) = {
        let labels = ds.labels().map(|l| l.to_vec());
        let kcfg_inner = kcfg.clone();
        let mut observe = |_sweep: usize, state: &awmvc::solver::SolverState| {
            if !args.trace_evolution {
                return;
            }
            let labels = labels.as_ref().expect("checked above");
            let consensus = state.m.as_ref().expect("set by the consensus step");
            if let Ok(assign) = kmeans(consensus, &kcfg_inner) {
                if let Ok(a) = metrics::acc(&assign.labels, labels) {
                    evolution_acc.push(a);
                }
            }
        };
        fit_observed(&cfg, &ds, &mut observe)?
    };
    let fit_seconds = fit_start.elapsed().as_secs_f64();

    let kmeans_start = Instant::now();
    let assignment = kmeans(&report.consensus, &kcfg)?;
    let kmeans_seconds = kmeans_start.elapsed().as_secs_f64();

    let metrics_report = match ds.labels() {
        Some(truth) => Some(MetricsReport {
            acc: metrics::acc(&assignment.labels, truth)?,
            nmi: metrics::nmi(&assignment.labels, truth)?,
            purity: metrics::purity(&assignment.labels, truth)?,
            fscore: metrics::fscore(&assignment.labels, truth)?,
        }),
        None => None,
    };

    let resolved_m = report.alpha_final.len();
    let run_report = RunReport {
        schema: 1,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: args.seed,
        config: ConfigEcho {
            clusters: k,
            m: resolved_m,
            dims: if cfg.variant == Variant::FixedDim { vec![k] } else { cfg.dims.clone() },
            max_iter: cfg.max_iter,
            tol: cfg.tol,
            variant: variant_name(cfg.variant).to_string(),
            alpha_rule: alpha_rule_name(cfg.alpha_rule).to_string(),
            kmeans_restarts: kcfg.restarts,
            normalize: match args.normalize {
                NormalizeArg::None => "none".to_string(),
                NormalizeArg::PerSampleL2 => "per-sample-l2".to_string(),
            },
            trace_evolution: args.trace_evolution,
        },
        dataset: DatasetSummary {
            name: meta.name.clone(),
            n: ds.n(),
            views: ds
                .views()
                .iter()
                .map(|v| ViewSummary {
                    name: v.name.clone(),
                    d: v.dim(),
                })
                .collect(),
            k_true: ds.n_classes(),
        },
        fit: FitSummary {
            iterations: report.iterations,
            converged: report.converged,
            lower_bound: report.lower_bound,
            objective_trace: report.objective_trace.clone(),
            alpha_trace: report.alpha_trace.clone(),
            beta_trace: report.beta_trace.clone(),
            per_step_seconds: report.per_step_seconds.clone(),
            consensus: (0..report.consensus.nrows())
                .map(|i| report.consensus.row(i).iter().copied().collect())
                .collect(),
        },
        weights: WeightsReport {
            alpha: report.alpha_final.clone(),
            alpha_squared: report.alpha_final.iter().map(|a| a * a).collect(),
            beta: report.beta_final.clone(),
        },
        kmeans: KMeansSummary {
            best_sse: assignment.sse,
            restarts: assignment.restarts_run,
        },
        metrics: metrics_report,
        metric_variants: MetricVariants {
            nmi: "sqrt-normalized".to_string(),
            fscore: "pairwise".to_string(),
            alpha_rule: alpha_rule_name(cfg.alpha_rule).to_string(),
        },
        timings: Timings {
            total_seconds: total_start.elapsed().as_secs_f64(),
            fit_seconds,
            kmeans_seconds,
        },
    };

    let json = serde_json::to_string_pretty(&run_report)
        .map_err(|e| Error::validation(format!("report serialization failed: {e}")))?;
    println!("{json}");
    if let Some(path) = &args.output {
        fs::write(path, format!("{json}\n"))?;
    }

    if let Some(path) = &args.trace {
        write_trace(path, &report, args.trace_evolution.then_some(&evolution_acc))?;
    }

    if let Some(m) = &run_report.metrics {
        eprintln!(
            "acc {:.2}  nmi {:.2}  purity {:.2}  fscore {:.2}  ({} sweeps, converged={})",
            100.0 * m.acc,
            100.0 * m.nmi,
            100.0 * m.purity,
            100.0 * m.fscore,
            report.iterations,
            report.converged
        );
    } else {
        eprintln!(
            "no labels: fitted in {} sweeps (converged={}), best sse {:.6}",
            report.iterations, report.converged, assignment.sse
        );
    }
    Ok(())
}

/// Trace CSV: `iter,objective,alpha_1..m,beta_1..m[,acc_of_m]`, one row per
/// sweep.
fn write_trace(
    path: &std::path::Path,
    report: &awmvc::solver::FitReport,
    evolution: Option<&Vec<f64>>,
) -> Result<()> {
    let m = report.alpha_final.len();
    let mut out = String::new();
    out.push_str("iter,objective");
    for p in 1..=m {
        out.push_str(&format!(",alpha_{p}"));
    }
    for p in 1..=m {
        out.push_str(&format!(",beta_{p}"));
    }
    if evolution.is_some() {
        out.push_str(",acc_of_m");
    }
    out.push('\n');
    for i in 0..report.iterations {
        out.push_str(&format!("{},{}", i + 1, report.objective_trace[i]));
        for &a in &report.alpha_trace[i] {
            out.push_str(&format!(",{a}"));
        }
        for &b in &report.beta_trace[i] {
            out.push_str(&format!(",{b}"));
        }
        if let Some(acc) = evolution {
            out.push_str(&format!(",{}", acc[i]));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let pred = remap_labels(&dataset::read_labels_csv(&args.pred)?);
    let truth = remap_labels(&dataset::read_labels_csv(&args.truth)?);
    let acc = metrics::acc(&pred, &truth)?;
    let nmi = metrics::nmi(&pred, &truth)?;
    let purity = metrics::purity(&pred, &truth)?;
    let fscore = metrics::fscore(&pred, &truth)?;
    // Percentages with two decimals, matching the usual table formatting.
    println!(
        "{{\"acc\": {:.2}, \"nmi\": {:.2}, \"purity\": {:.2}, \"fscore\": {:.2}}}",
        100.0 * acc,
        100.0 * nmi,
        100.0 * purity,
        100.0 * fscore
    );
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let (_, dims) = resolve_dims(args.clusters, args.m, args.dims.clone())?;
    let mut csv = String::from("n,fit_seconds,kmeans_seconds\n");
    for &n in &args.n_list {
        let spec = synthetic_spec(
            n,
            args.views,
            args.clusters,
            args.latent_dim,
            args.view_dims.clone(),
            args.noise_sigma,
            args.center_spread,
            args.seed,
        );
        let ds = generate_synthetic(&spec)?;
        let cfg = SolverConfig {
            k: args.clusters,
            m: dims.len(),
            dims: dims.clone(),
            max_iter: args.iters,
            // Effectively disabled so every row times the same sweep count.
            tol: f64::MIN_POSITIVE,
            seed: args.seed,
            variant: Variant::Full,
            alpha_rule: AlphaRule::Reciprocal,
        };
        let fit_start = Instant::now();
        let (_, report) = awmvc::solver::fit(&cfg, &ds)?;
        let fit_seconds = fit_start.elapsed().as_secs_f64();

        let kcfg = KMeansConfig {
            k: args.clusters,
            restarts: args.kmeans_restarts,
            max_lloyd_iters: 100,
            seed: args.seed,
        };
        let kmeans_start = Instant::now();
        kmeans(&report.consensus, &kcfg)?;
        let kmeans_seconds = kmeans_start.elapsed().as_secs_f64();

        csv.push_str(&format!("{n},{fit_seconds},{kmeans_seconds}\n"));
        eprintln!(
            "n={n}: {} sweeps in {fit_seconds:.3}s, k-means {kmeans_seconds:.3}s",
            report.iterations
        );
    }
    print!("{csv}");
    std::io::stdout().flush()?;
    if let Some(path) = &args.out {
        fs::write(path, csv)?;
    }
    Ok(())
}
