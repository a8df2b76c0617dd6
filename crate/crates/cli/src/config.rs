//! Experiment configuration: a single JSON document per experiment.
//!
//! Every field except `dataset` has a default. An unset cluster count is
//! filled in from the data before a run, so the config echoed in a report is
//! complete.

use std::path::PathBuf;

use mimb::eval::NmiNorm;
use mimb::graphs::Kernel;
use mimb::solver::{BStep, ClusterTarget};
use mimb::HyperParams;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    #[serde(default)]
    pub mask: MaskSpec,
    #[serde(default)]
    pub hyperparams: HyperParamsConfig,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub cluster_on: ClusterOn,
    /// Repeat `i` uses seed `seed + i` for its mask and solver.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_restarts")]
    pub kmeans_restarts: usize,
    #[serde(default)]
    pub nmi_norm: NmiNormName,
}

fn default_repeats() -> usize {
    5
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_restarts() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Files {
        views: Vec<PathBuf>,
        #[serde(default)]
        labels: Option<PathBuf>,
        #[serde(default)]
        header: bool,
        /// Per-feature min-max rescaling of the observed entries.
        #[serde(default)]
        minmax: bool,
    },
    Synth {
        #[serde(default = "default_synth_n")]
        n: usize,
        #[serde(default = "default_synth_c")]
        c: usize,
        #[serde(default = "default_synth_dims")]
        dims: Vec<usize>,
        #[serde(default = "default_separation")]
        separation: f64,
        #[serde(default = "default_noise")]
        noise: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_synth_n() -> usize {
    300
}

fn default_synth_c() -> usize {
    3
}

fn default_synth_dims() -> Vec<usize> {
    vec![20, 30]
}

fn default_separation() -> f64 {
    6.0
}

fn default_noise() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskSpec {
    RandomMissing { ratio: f64 },
    PairedPreserved { paired_ratio: f64 },
    FromFile { path: PathBuf },
}

impl Default for MaskSpec {
    fn default() -> Self {
        MaskSpec::RandomMissing { ratio: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParamsConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub beta: f64,
    pub r: f64,
    /// Defaults to the number of distinct labels.
    pub c: Option<usize>,
    pub k_graph: usize,
    pub kernel: KernelName,
    pub max_iter: usize,
    /// `"inf"` is accepted for a single-sweep run.
    #[serde(serialize_with = "ser_float", deserialize_with = "de_float")]
    pub tol: f64,
    pub eps: f64,
    pub b_step: BStepName,
}

impl Default for HyperParamsConfig {
    fn default() -> Self {
        let d = HyperParams::new(2);
        Self {
            lambda1: d.lambda1,
            lambda2: d.lambda2,
            lambda3: d.lambda3,
            beta: d.beta,
            r: d.r,
            c: None,
            k_graph: d.k_graph,
            kernel: KernelName::Heat,
            max_iter: d.max_iter,
            tol: d.tol,
            eps: d.eps,
            b_step: BStepName::Published,
        }
    }
}

impl HyperParamsConfig {
    /// Solver parameters for one repeat; `c` must already be resolved.
    pub fn to_params(&self, seed: u64) -> HyperParams {
        HyperParams {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            lambda3: self.lambda3,
            beta: self.beta,
            r: self.r,
            c: self.c.unwrap_or(0),
            k_graph: self.k_graph,
            kernel: self.kernel.into(),
            max_iter: self.max_iter,
            tol: self.tol,
            eps: self.eps,
            seed,
            b_step: self.b_step.into(),
        }
    }
}

fn ser_float<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_infinite() && *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

fn de_float<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!(
            "expected a number or \"inf\", got {t:?}"
        ))),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelName {
    #[default]
    Heat,
    Binary,
}

impl From<KernelName> for Kernel {
    fn from(k: KernelName) -> Self {
        match k {
            KernelName::Heat => Kernel::Heat,
            KernelName::Binary => Kernel::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BStepName {
    #[default]
    Published,
    Exact,
}

impl From<BStepName> for BStep {
    fn from(b: BStepName) -> Self {
        match b {
            BStepName::Published => BStep::Published,
            BStepName::Exact => BStep::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum ClusterOn {
    #[default]
    #[value(name = "P")]
    P,
    #[value(name = "F")]
    F,
    #[serde(rename = "S_spectral")]
    #[value(name = "S_spectral")]
    SSpectral,
}

impl From<ClusterOn> for ClusterTarget {
    fn from(c: ClusterOn) -> Self {
        match c {
            ClusterOn::P => ClusterTarget::P,
            ClusterOn::F => ClusterTarget::F,
            ClusterOn::SSpectral => ClusterTarget::SSpectral,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NmiNormName {
    #[default]
    Sqrt,
    Mean,
    Max,
}

impl From<NmiNormName> for NmiNorm {
    fn from(n: NmiNormName) -> Self {
        match n {
            NmiNormName::Sqrt => NmiNorm::Sqrt,
            NmiNormName::Mean => NmiNorm::Mean,
            NmiNormName::Max => NmiNorm::Max,
        }
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let config: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.kmeans_restarts == 0 {
            return bad("kmeans_restarts must be at least 1".into());
        }
        match &self.mask {
            MaskSpec::RandomMissing { ratio } if !(0.0..1.0).contains(ratio) => {
                return bad(format!(
                    "random_missing ratio must lie in [0, 1), got {ratio}"
                ));
            }
            MaskSpec::PairedPreserved { paired_ratio }
                if !(*paired_ratio > 0.0 && *paired_ratio <= 1.0) =>
            {
                return bad(format!(
                    "paired_ratio must lie in (0, 1], got {paired_ratio}"
                ));
            }
            _ => {}
        }
        match &self.dataset {
            DatasetSource::Files { views, .. } if views.is_empty() => {
                return bad("dataset.views must list at least one file".into());
            }
            DatasetSource::Synth {
                n,
                c,
                dims,
                separation,
                noise,
                ..
            } => {
                if *c < 2 || n < c || dims.is_empty() || dims.contains(&0) {
                    return bad(format!("synthetic dataset needs n >= c >= 2 and positive dims, got n={n}, c={c}, dims={dims:?}"));
                }
                if !(*separation > 0.0 && *noise > 0.0) {
                    return bad("synthetic separation and noise must be positive".into());
                }
            }
            _ => {}
        }
        // an unset cluster count is filled in from the labels later
        let mut probe = self.hyperparams.clone();
        probe.c.get_or_insert(2);
        probe
            .to_params(0)
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }
}
