//! The subcommands, as library functions so that tests can drive them.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mimb::baseline::{mean_filled_view, stacked_zero_filled};
use mimb::data::{
    labels_to_string, load_dataset, matrix_to_csv, paired_preserved_masks, parse_labels,
    parse_mask_csv, random_missing_masks, reindex_labels, synth_multiview, LoadOptions, SynthSpec,
};
use mimb::error::SolverError;
use mimb::eval::{kmeans_restarts, KMeans, NmiNorm};
use mimb::solver::{cluster_points, fit, ModelState};
use mimb::{IncompleteDataset, Mask};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::{DatasetSource, ExperimentConfig, MaskSpec};
use crate::report::{
    metrics_csv, trace_csv, write_file, Metrics, PhaseTimings, RepeatResult, RunReport,
};
use crate::CliError;

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    crate::config::parse_config(&text)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// The complete (unmasked) dataset a config points at.
pub fn load_source(config: &ExperimentConfig) -> Result<IncompleteDataset, CliError> {
    Ok(match &config.dataset {
        DatasetSource::Files {
            views,
            labels,
            header,
            ..
        } => load_dataset(
            views,
            None,
            labels.as_deref(),
            LoadOptions {
                header: *header,
                minmax: false,
            },
        )?,
        DatasetSource::Synth {
            n,
            c,
            dims,
            separation,
            noise,
            seed,
        } => synth_multiview(&SynthSpec {
            n: *n,
            c: *c,
            dims: dims.clone(),
            separation: *separation,
            noise: *noise,
            seed: *seed,
        })?,
    })
}

/// Mask of one repeat. File masks are the same for every repeat.
pub fn repeat_mask(
    config: &ExperimentConfig,
    n: usize,
    l: usize,
    seed: u64,
) -> Result<Mask, CliError> {
    let mask = match &config.mask {
        MaskSpec::RandomMissing { ratio } if *ratio == 0.0 => Mask::full(n, l),
        MaskSpec::RandomMissing { ratio } => random_missing_masks(n, l, *ratio, seed)?,
        MaskSpec::PairedPreserved { paired_ratio } => {
            paired_preserved_masks(n, l, *paired_ratio, seed)?
        }
        MaskSpec::FromFile { path } => {
            let text = fs::read_to_string(path).map_err(|source| mimb::error::DataError::Io {
                path: path.clone(),
                source,
            })?;
            parse_mask_csv(&text)?
        }
    };
    if mask.n_samples() != n || mask.n_views() != l {
        return Err(CliError::Config(format!(
            "mask is {} × {}, dataset has {n} samples and {l} views",
            mask.n_samples(),
            mask.n_views()
        )));
    }
    Ok(mask)
}

fn apply_mask(
    config: &ExperimentConfig,
    complete: &IncompleteDataset,
    mask: Mask,
) -> Result<IncompleteDataset, CliError> {
    let masked = complete.with_mask(mask)?;
    Ok(match config.dataset {
        DatasetSource::Files { minmax: true, .. } => masked.minmax_rescaled(),
        _ => masked,
    })
}

/// Fills in the cluster count from the data.
fn resolve(
    config: &ExperimentConfig,
    dataset: &IncompleteDataset,
) -> Result<ExperimentConfig, CliError> {
    let mut resolved = config.clone();
    if resolved.hyperparams.c.is_none() {
        let c = match &config.dataset {
            DatasetSource::Synth { c, .. } => Some(*c),
            DatasetSource::Files { .. } => dataset.n_classes(),
        };
        resolved.hyperparams.c = Some(c.ok_or_else(|| {
            CliError::Config("hyperparams.c is required when the dataset has no labels".into())
        })?);
    }
    Ok(resolved)
}

/// Best-objective restart plus the scores of every restart.
struct Clustering {
    best: KMeans,
    metrics: Option<Metrics>,
    restart_mean: Option<Metrics>,
}

fn cluster(
    points: &DMatrix<f64>,
    c: usize,
    truth: Option<&[usize]>,
    restarts: usize,
    seed: u64,
    norm: NmiNorm,
) -> Result<Clustering, CliError> {
    let runs = kmeans_restarts(points, c, restarts, seed)?;
    let best = runs
        .iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .expect("at least one restart")
        .clone();
    let (metrics, restart_mean) = match truth {
        Some(truth) => {
            let all = runs
                .iter()
                .map(|r| Metrics::score(&r.labels, truth, norm))
                .collect::<Result<Vec<_>, _>>()?;
            (
                Some(Metrics::score(&best.labels, truth, norm)?),
                Some(Metrics::mean(&all)),
            )
        }
        None => (None, None),
    };
    Ok(Clustering {
        best,
        metrics,
        restart_mean,
    })
}

/// Writes `P` (samples as rows), `S` and `α` of a state into `dir` with the
/// given file-name suffix.
pub fn dump_state(state: &ModelState, dir: &Path, suffix: &str) -> Result<(), CliError> {
    create_dir(dir)?;
    write_file(
        &dir.join(format!("p{suffix}.csv")),
        &matrix_to_csv(&state.p.transpose()),
    )?;
    write_file(
        &dir.join(format!("s{suffix}.csv")),
        &matrix_to_csv(&state.s),
    )?;
    let alpha: String = state.alpha.iter().map(|a| format!("{a}\n")).collect();
    write_file(&dir.join(format!("alpha{suffix}.csv")), &alpha)
}

fn solver_error(err: SolverError, out_dir: &Path, repeat: usize) -> CliError {
    match err {
        SolverError::InvalidParams(_)
        | SolverError::TooManyClusters { .. }
        | SolverError::ZeroLambda2 => CliError::Config(err.to_string()),
        SolverError::NonFinite { iter, state } => {
            let dir = out_dir.join(format!("failure_{repeat}"));
            let dump = dump_state(&state, &dir, "").ok().map(|_| dir);
            CliError::Numerical {
                message: format!(
                    "repeat {repeat}: objective became non-finite at iteration {iter}"
                ),
                dump,
            }
        }
        other => CliError::Numerical {
            message: format!("repeat {repeat}: {other}"),
            dump: None,
        },
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitOptions {
    /// Also write `p_<i>.csv`, `s_<i>.csv` and `alpha_<i>.csv` per repeat.
    pub dump_state: bool,
}

fn finish(
    method: &str,
    config: ExperimentConfig,
    repeats: Vec<RepeatResult>,
    load_seconds: f64,
    started: Instant,
) -> Result<RunReport, CliError> {
    let report = RunReport {
        method: method.into(),
        seeds: repeats.iter().map(|r| r.seed).collect(),
        summary: RunReport::summarize(&repeats),
        config,
        repeats,
        load_seconds,
        total_seconds: started.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&report.config.out_dir.join("report.json"), &json)?;
    write_file(
        &report.config.out_dir.join("metrics.csv"),
        &metrics_csv(&report.repeats),
    )?;
    Ok(report)
}

/// Runs the optimizer once per repeat and writes `report.json`,
/// `metrics.csv`, `trace_<i>.csv` and `labels_<i>.csv` to the output
/// directory.
pub fn cmd_fit(config: &ExperimentConfig, options: FitOptions) -> Result<RunReport, CliError> {
    let started = Instant::now();
    config.validate()?;
    let complete = load_source(config)?;
    let config = resolve(config, &complete)?;
    let load_seconds = started.elapsed().as_secs_f64();
    let out = config.out_dir.clone();
    create_dir(&out)?;
    let c = config.hyperparams.c.expect("resolved");
    let norm = config.nmi_norm.into();

    let mut repeats = Vec::with_capacity(config.repeats);
    for i in 0..config.repeats {
        let seed = config.seed + i as u64;
        let t = Instant::now();
        let mask = repeat_mask(&config, complete.n_samples(), complete.n_views(), seed)?;
        let dataset = apply_mask(&config, &complete, mask)?;
        let mask_seconds = t.elapsed().as_secs_f64();

        let t = Instant::now();
        let params = config.hyperparams.to_params(seed);
        let (state, fit_report) = fit(&dataset, &params).map_err(|e| solver_error(e, &out, i))?;
        let fit_seconds = t.elapsed().as_secs_f64();
        log::info!(
            "repeat {i}: {} iterations, objective {:.6e}",
            fit_report.iterations(),
            fit_report.final_objective()
        );

        let t = Instant::now();
        let points = cluster_points(&state, config.cluster_on.into());
        let clustering = cluster(
            &points,
            c,
            dataset.labels(),
            config.kmeans_restarts,
            seed,
            norm,
        )?;
        let cluster_seconds = t.elapsed().as_secs_f64();

        write_file(
            &out.join(format!("trace_{i}.csv")),
            &trace_csv(&fit_report, dataset.n_views()),
        )?;
        write_file(
            &out.join(format!("labels_{i}.csv")),
            &labels_to_string(&clustering.best.labels),
        )?;
        if options.dump_state {
            dump_state(&state, &out, &format!("_{i}"))?;
        }
        repeats.push(RepeatResult {
            repeat: i,
            seed,
            metrics: clustering.metrics,
            restart_mean: clustering.restart_mean,
            iterations: fit_report.iterations(),
            final_objective: fit_report.final_objective(),
            converged: fit_report.converged,
            timings: PhaseTimings {
                mask_seconds,
                fit_seconds,
                cluster_seconds,
            },
        });
    }
    finish("mimb", config, repeats, load_seconds, started)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum BaselineMethod {
    /// Mean-imputed views clustered one at a time; the best view is reported.
    BsvMeanfill,
    /// Zero-filled views concatenated and clustered once.
    ConcatZerofill,
}

impl BaselineMethod {
    fn name(self) -> &'static str {
        match self {
            BaselineMethod::BsvMeanfill => "bsv_meanfill",
            BaselineMethod::ConcatZerofill => "concat_zerofill",
        }
    }
}

/// Runs a k-means baseline on the same masks as [`cmd_fit`]. The reported
/// `final_objective` is the k-means objective and `iterations` is zero.
pub fn cmd_baseline(
    config: &ExperimentConfig,
    method: BaselineMethod,
) -> Result<RunReport, CliError> {
    let started = Instant::now();
    config.validate()?;
    let complete = load_source(config)?;
    let config = resolve(config, &complete)?;
    let load_seconds = started.elapsed().as_secs_f64();
    create_dir(&config.out_dir)?;
    let c = config.hyperparams.c.expect("resolved");
    let norm = config.nmi_norm.into();
    if method == BaselineMethod::BsvMeanfill && complete.labels().is_none() {
        return Err(CliError::Config(
            "bsv_meanfill picks its view by accuracy and needs labels".into(),
        ));
    }

    let mut repeats = Vec::with_capacity(config.repeats);
    for i in 0..config.repeats {
        let seed = config.seed + i as u64;
        let t = Instant::now();
        let mask = repeat_mask(&config, complete.n_samples(), complete.n_views(), seed)?;
        let dataset = apply_mask(&config, &complete, mask)?;
        let mask_seconds = t.elapsed().as_secs_f64();

        let t = Instant::now();
        let truth = dataset.labels();
        let clustering = match method {
            BaselineMethod::ConcatZerofill => cluster(
                &stacked_zero_filled(&dataset),
                c,
                truth,
                config.kmeans_restarts,
                seed,
                norm,
            )?,
            BaselineMethod::BsvMeanfill => {
                let mut best: Option<Clustering> = None;
                for v in 0..dataset.n_views() {
                    let points = mean_filled_view(&dataset, v).transpose();
                    let run = cluster(&points, c, truth, config.kmeans_restarts, seed, norm)?;
                    let acc = run.metrics.expect("labels checked").acc;
                    if best
                        .as_ref()
                        .is_none_or(|b| acc > b.metrics.expect("labels checked").acc)
                    {
                        best = Some(run);
                    }
                }
                best.expect("at least one view")
            }
        };
        let cluster_seconds = t.elapsed().as_secs_f64();
        write_file(
            &config.out_dir.join(format!("labels_{i}.csv")),
            &labels_to_string(&clustering.best.labels),
        )?;
        repeats.push(RepeatResult {
            repeat: i,
            seed,
            metrics: clustering.metrics,
            restart_mean: clustering.restart_mean,
            iterations: 0,
            final_objective: clustering.best.objective,
            converged: true,
            timings: PhaseTimings {
                mask_seconds,
                fit_seconds: 0.0,
                cluster_seconds,
            },
        });
    }
    finish(method.name(), config, repeats, load_seconds, started)
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    n: usize,
    c: usize,
    dims: &'a [usize],
    separation: f64,
    noise: f64,
    seed: u64,
    views: Vec<String>,
    labels: &'static str,
}

/// Writes `view_<v>.csv` (1-based), `labels.csv` and `manifest.json`.
pub fn cmd_synth(spec: &SynthSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let dataset = synth_multiview(spec)?;
    create_dir(out)?;
    let mut views = Vec::new();
    for (v, x) in dataset.views().iter().enumerate() {
        let name = format!("view_{}.csv", v + 1);
        write_file(&out.join(&name), &matrix_to_csv(&x.transpose()))?;
        views.push(name);
    }
    let labels = dataset.labels().expect("synthetic data is labeled");
    write_file(&out.join("labels.csv"), &labels_to_string(labels))?;
    let manifest = Manifest {
        n: spec.n,
        c: spec.c,
        dims: &spec.dims,
        separation: spec.separation,
        noise: spec.noise,
        seed: spec.seed,
        views: views.clone(),
        labels: "labels.csv",
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&out.join("manifest.json"), &json)?;
    Ok(views.iter().map(|v| out.join(v)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MaskStrategy {
    RandomMissing,
    PairedPreserved,
}

/// Generates a mask and writes it as CSV.
pub fn cmd_mask(
    n: usize,
    l: usize,
    strategy: MaskStrategy,
    ratio: f64,
    seed: u64,
    out: &Path,
) -> Result<Mask, CliError> {
    let mask = match strategy {
        MaskStrategy::RandomMissing => random_missing_masks(n, l, ratio, seed)?,
        MaskStrategy::PairedPreserved => paired_preserved_masks(n, l, ratio, seed)?,
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(out, &mask.to_csv())?;
    Ok(mask)
}

/// Scores a predicted labels file against a ground-truth labels file.
pub fn cmd_eval(pred: &Path, truth: &Path, norm: NmiNorm) -> Result<Metrics, CliError> {
    let read = |path: &Path| -> Result<Vec<usize>, CliError> {
        let text = fs::read_to_string(path).map_err(|source| mimb::error::DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(reindex_labels(&parse_labels(&text)?))
    };
    Metrics::score(&read(pred)?, &read(truth)?, norm)
}
