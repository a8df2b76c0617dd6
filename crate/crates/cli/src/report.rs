//! Run reports and the CSV files written next to them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mimb::eval::{accuracy, nmi, purity, NmiNorm};
use mimb::solver::FitReport;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
}

impl Metrics {
    pub fn score(pred: &[usize], truth: &[usize], norm: NmiNorm) -> Result<Self, CliError> {
        Ok(Self {
            acc: accuracy(pred, truth)?,
            nmi: nmi(pred, truth, norm)?,
            purity: purity(pred, truth)?,
        })
    }

    fn map(items: &[Metrics], f: impl Fn(&[f64]) -> f64) -> Metrics {
        let pick = |g: fn(&Metrics) -> f64| f(&items.iter().map(g).collect::<Vec<_>>());
        Metrics {
            acc: pick(|m| m.acc),
            nmi: pick(|m| m.nmi),
            purity: pick(|m| m.purity),
        }
    }

    pub fn mean(items: &[Metrics]) -> Metrics {
        Self::map(items, mean)
    }

    /// Sample standard deviation; zero for a single item.
    pub fn std(items: &[Metrics]) -> Metrics {
        Self::map(items, |xs| {
            if xs.len() < 2 {
                return 0.0;
            }
            let m = mean(xs);
            (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
        })
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub mask_seconds: f64,
    pub fit_seconds: f64,
    pub cluster_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub repeat: usize,
    pub seed: u64,
    /// Scores of the k-means restart with the lowest objective.
    pub metrics: Option<Metrics>,
    /// Scores averaged over every k-means restart.
    pub restart_mean: Option<Metrics>,
    pub iterations: usize,
    pub final_objective: f64,
    pub converged: bool,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: Metrics,
    pub std: Metrics,
    pub restart_mean: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: String,
    /// The configuration with every default filled in.
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub repeats: Vec<RepeatResult>,
    /// Present when the dataset carries labels.
    pub summary: Option<Summary>,
    pub load_seconds: f64,
    pub total_seconds: f64,
}

impl RunReport {
    pub fn summarize(repeats: &[RepeatResult]) -> Option<Summary> {
        let best: Option<Vec<Metrics>> = repeats.iter().map(|r| r.metrics).collect();
        let all: Option<Vec<Metrics>> = repeats.iter().map(|r| r.restart_mean).collect();
        let (best, all) = (best?, all?);
        Some(Summary {
            mean: Metrics::mean(&best),
            std: Metrics::std(&best),
            restart_mean: Metrics::mean(&all),
        })
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `repeat,seed,acc,nmi,purity,iterations,final_objective`; metric cells are
/// empty for unlabeled data.
pub fn metrics_csv(repeats: &[RepeatResult]) -> String {
    let mut out = String::from("repeat,seed,acc,nmi,purity,iterations,final_objective\n");
    for r in repeats {
        let (acc, nmi, purity) = match r.metrics {
            Some(m) => (m.acc.to_string(), m.nmi.to_string(), m.purity.to_string()),
            None => Default::default(),
        };
        writeln!(
            out,
            "{},{},{acc},{nmi},{purity},{},{}",
            r.repeat, r.seed, r.iterations, r.final_objective
        )
        .unwrap();
    }
    out
}

/// One row per completed sweep.
pub fn trace_csv(report: &FitReport, n_views: usize) -> String {
    let mut out =
        String::from("iter,objective,term_recovery,term_inverse,term_manifold_fit,term_rank");
    for v in 1..=n_views {
        write!(out, ",alpha_{v}").unwrap();
    }
    out.push('\n');
    for rec in &report.records {
        let t = &rec.terms;
        write!(
            out,
            "{},{},{},{},{},{}",
            rec.iter, rec.objective, t.recovery, t.inverse, t.manifold_fit, t.rank
        )
        .unwrap();
        for a in &rec.alpha {
            write!(out, ",{a}").unwrap();
        }
        out.push('\n');
    }
    out
}
