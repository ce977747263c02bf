//! Experiment configuration files (TOML).
//!
//! A config names the experiment kind, the dataset parameters for that kind,
//! the models to train and, optionally, an ensemble. Unknown keys are
//! rejected and `schema_version` must match [`SCHEMA_VERSION`]. Every seed
//! in a config is an offset added to the run seed (`seed`, overridable with
//! `--seed`).

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use sdae_core::datagen::{LogColumn, LogSource, Placement, WellCorruption, PROCESS_POINTS, SP_POINTS, WELL_LOGS};
use sdae_core::nn::{Sparsity, TrainSpec};
use sdae_core::stacked::Perturbation;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Math,
    Sp,
    Seismic,
    Well,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Math => "math",
            ExperimentKind::Sp => "sp",
            ExperimentKind::Seismic => "seismic",
            ExperimentKind::Well => "well",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Share of the generated training data used for training; the rest validates.
    pub split: f64,
    /// Default run directory when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub math: Option<MathConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sp: Option<SpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seismic: Option<SeismicConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub well: Option<WellConfig>,
    #[serde(default)]
    pub models: Vec<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MathConfig {
    pub train_count: usize,
    pub test_count: usize,
    pub noisy_fraction: f64,
    pub train_level: f64,
    pub test_min_level: f64,
    pub test_max_level: f64,
    pub train_seed: u64,
    pub test_seed: u64,
}

impl Default for MathConfig {
    fn default() -> Self {
        MathConfig {
            train_count: 2000,
            test_count: 100,
            noisy_fraction: 0.5,
            train_level: 0.25,
            test_min_level: 0.10,
            test_max_level: 0.25,
            train_seed: 0,
            test_seed: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpConfig {
    pub train_count: usize,
    pub test_count: usize,
    pub noisy_fraction: f64,
    pub level: f64,
    pub noisy_point_fraction: f64,
    /// Divide every sample by the peak magnitude of its noisy version before
    /// the network sees it; outputs are scaled back.
    pub per_sample_scaling: bool,
    pub train_seed: u64,
    pub test_seed: u64,
}

impl Default for SpConfig {
    fn default() -> Self {
        SpConfig {
            train_count: 6000,
            test_count: 1000,
            noisy_fraction: 2.0 / 3.0,
            level: 0.5,
            noisy_point_fraction: 0.5,
            per_sample_scaling: true,
            train_seed: 100,
            test_seed: 5000,
        }
    }
}

/// Patches span the whole time axis (`time_samples` rows) and slide along the
/// traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeismicConfig {
    pub time_samples: usize,
    pub dt: f64,
    pub wavelet_freq_hz: f64,
    pub reflectors: usize,
    pub max_dip: f64,
    pub train_sections: usize,
    pub train_traces: usize,
    pub clean_patches: usize,
    pub noisy_per_clean: usize,
    pub patch_cols: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub test_traces: usize,
    pub corrupted_traces: usize,
    pub min_trace_gap: usize,
    pub section_seed: u64,
    pub patch_seed: u64,
    pub test_seed: u64,
    pub trace_seed: u64,
    pub corrupt_seed: u64,
}

impl Default for SeismicConfig {
    fn default() -> Self {
        SeismicConfig {
            time_samples: 42,
            dt: 0.002,
            wavelet_freq_hz: 40.0,
            reflectors: 10,
            max_dip: 0.3,
            train_sections: 20,
            train_traces: 120,
            clean_patches: 16667,
            noisy_per_clean: 2,
            patch_cols: 9,
            fmin_hz: 100.0,
            fmax_hz: 220.0,
            test_traces: 99,
            corrupted_traces: 7,
            min_trace_gap: 10,
            section_seed: 1000,
            patch_seed: 5,
            test_seed: 7,
            trace_seed: 3,
            corrupt_seed: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceName {
    Synthetic1,
    KrishnaGodavari,
    MountElbert,
}

impl From<SourceName> for LogSource {
    fn from(s: SourceName) -> Self {
        match s {
            SourceName::Synthetic1 => LogSource::Synthetic1,
            SourceName::KrishnaGodavari => LogSource::KrishnaGodavari,
            SourceName::MountElbert => LogSource::MountElbert,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogName {
    Phi,
    Vsh,
    Sh,
    Vp,
}

impl From<LogName> for LogColumn {
    fn from(l: LogName) -> Self {
        match l {
            LogName::Phi => LogColumn::Phi,
            LogName::Vsh => LogColumn::Vsh,
            LogName::Sh => LogColumn::Sh,
            LogName::Vp => LogColumn::Vp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorruptionName {
    Mute,
    Noise,
}

impl From<CorruptionName> for WellCorruption {
    fn from(c: CorruptionName) -> Self {
        match c {
            CorruptionName::Mute => WellCorruption::Mute,
            CorruptionName::Noise => WellCorruption::Noise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementName {
    Contiguous,
    Scattered,
}

impl From<PlacementName> for Placement {
    fn from(p: PlacementName) -> Self {
        match p {
            PlacementName::Contiguous => Placement::Contiguous,
            PlacementName::Scattered => Placement::Scattered,
        }
    }
}

/// Training suites come from every lithology source; the test suite is one
/// suite of `test_source` with `test_log` corrupted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WellConfig {
    pub suite_len: usize,
    pub suites_per_source: usize,
    pub max_adjacent_change: f64,
    pub corrupted_copies: usize,
    pub min_fraction: f64,
    pub max_fraction: f64,
    pub mute_probability: f64,
    pub train_seed: u64,
    pub image_seed: u64,
    pub test_source: SourceName,
    pub test_log: LogName,
    pub test_corruption: CorruptionName,
    pub test_fraction: f64,
    pub test_placement: PlacementName,
    pub test_seed: u64,
    pub corrupt_seed: u64,
}

impl Default for WellConfig {
    fn default() -> Self {
        WellConfig {
            suite_len: 200,
            suites_per_source: 12,
            max_adjacent_change: 0.2,
            corrupted_copies: 7,
            min_fraction: 0.1,
            max_fraction: 0.4,
            mute_probability: 0.5,
            train_seed: 10,
            image_seed: 7,
            test_source: SourceName::MountElbert,
            test_log: LogName::Sh,
            test_corruption: CorruptionName::Mute,
            test_fraction: 0.2,
            test_placement: PlacementName::Contiguous,
            test_seed: 999,
            corrupt_seed: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "DA")]
    Da,
    #[serde(rename = "SDA")]
    Sda,
    #[serde(rename = "SDA-R")]
    SdaR,
}

impl Method {
    pub fn is_stacked(self) -> bool {
        matches!(self, Method::Sda | Method::SdaR)
    }
}

/// How raw values are mapped into the network's working units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum NormConfig {
    Identity,
    /// Per-coordinate mean/deviation of the training inputs (noisy) and
    /// targets (clean).
    Standardize,
    /// `(x - shift) / scale` on every coordinate, inputs and outputs alike.
    Uniform {
        shift: f64,
        scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub batch_size: usize,
    #[serde(default)]
    pub early_stop_patience: usize,
    #[serde(default)]
    pub seed: u64,
}

impl TrainConfig {
    pub fn spec(&self, run_seed: u64, l2_lambda: Vec<f64>, sparsity: Option<Sparsity>) -> TrainSpec {
        TrainSpec {
            learning_rate: self.learning_rate,
            max_epochs: self.max_epochs,
            batch_size: self.batch_size,
            l2_lambda,
            sparsity,
            seed: run_seed.wrapping_add(self.seed),
            early_stop_patience: self.early_stop_patience,
        }
    }
}

/// Settings shared by every pretraining stage of a stacked model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub batch_size: usize,
    #[serde(default)]
    pub early_stop_patience: usize,
    #[serde(default)]
    pub seed: u64,
    /// One coefficient per stage, applied to its encoder and, from the second
    /// stage on, its decoder. Empty means none.
    #[serde(default)]
    pub l2_lambda: Vec<f64>,
}

impl PretrainConfig {
    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            max_epochs: self.max_epochs,
            batch_size: self.batch_size,
            early_stop_patience: self.early_stop_patience,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbConfig {
    pub fraction: f64,
    pub magnitude: f64,
    #[serde(default)]
    pub seed: u64,
}

impl PerturbConfig {
    pub fn resolve(&self, run_seed: u64) -> Perturbation {
        Perturbation { fraction: self.fraction, magnitude: self.magnitude, seed: run_seed.wrapping_add(self.seed) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparsityConfig {
    pub target: f64,
    pub weight: f64,
    pub layer: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub method: Method,
    pub hidden: Vec<usize>,
    /// One coefficient per weight matrix (`hidden.len() + 1`); empty means none.
    #[serde(default)]
    pub l2_lambda: Vec<f64>,
    #[serde(default)]
    pub init_seed: u64,
    pub norm: NormConfig,
    pub train: TrainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pretrain: Option<PretrainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<PerturbConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<SparsityConfig>,
    /// Well experiments: depth samples per image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_rows: Option<usize>,
    /// Well experiments: depth step between training images.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_stride: Option<usize>,
}

impl ModelConfig {
    pub fn sparsity(&self) -> Option<Sparsity> {
        self.sparsity.map(|s| Sparsity { target: s.target, weight: s.weight, layer: s.layer })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    /// Model names, combined in this order.
    pub members: Vec<String>,
    pub weights: Vec<f64>,
}

pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = parse(&text)?;
    Ok(config)
}

/// Parses and validates.
pub fn parse(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn to_toml(config: &ExperimentConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| Error::config(e.to_string()))
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(msg()))
    }
}

fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

impl ExperimentConfig {
    pub fn math(&self) -> MathConfig {
        self.math.clone().unwrap_or_default()
    }

    pub fn sp(&self) -> SpConfig {
        self.sp.clone().unwrap_or_default()
    }

    pub fn seismic(&self) -> SeismicConfig {
        self.seismic.clone().unwrap_or_default()
    }

    pub fn well(&self) -> WellConfig {
        self.well.clone().unwrap_or_default()
    }

    pub fn model(&self, name: &str) -> Option<&ModelConfig> {
        self.models.iter().find(|m| m.name == name)
    }

    /// Network input width for a model of this experiment.
    pub fn sample_dim(&self, model: &ModelConfig) -> usize {
        match self.kind {
            ExperimentKind::Math => PROCESS_POINTS,
            ExperimentKind::Sp => SP_POINTS,
            ExperimentKind::Seismic => {
                let s = self.seismic();
                s.time_samples * s.patch_cols
            }
            ExperimentKind::Well => model.window_rows.unwrap_or(0) * WELL_LOGS,
        }
    }

    /// Distinct well window sizes with their image strides, in ascending order.
    pub fn well_windows(&self) -> BTreeMap<usize, usize> {
        self.models.iter().filter_map(|m| m.window_rows.map(|r| (r, m.image_stride.unwrap_or(1)))).collect()
    }

    /// Checks everything that can be checked without touching the disk.
    pub fn validate(&self) -> Result<()> {
        check(self.schema_version == SCHEMA_VERSION, || {
            format!("schema_version: expected {SCHEMA_VERSION}, got {}", self.schema_version)
        })?;
        check(self.split > 0.0 && self.split < 1.0, || format!("split: must lie in (0, 1), got {}", self.split))?;
        let tables = [
            (ExperimentKind::Math, self.math.is_some()),
            (ExperimentKind::Sp, self.sp.is_some()),
            (ExperimentKind::Seismic, self.seismic.is_some()),
            (ExperimentKind::Well, self.well.is_some()),
        ];
        for (kind, present) in tables {
            check(!present || kind == self.kind, || {
                format!("[{}]: table given for a {} experiment", kind.name(), self.kind.name())
            })?;
        }
        match self.kind {
            ExperimentKind::Math => self.math().validate()?,
            ExperimentKind::Sp => self.sp().validate()?,
            ExperimentKind::Seismic => self.seismic().validate()?,
            ExperimentKind::Well => self.well().validate()?,
        }
        check(!self.models.is_empty(), || "models: at least one [[models]] entry is required".into())?;
        let mut names = HashSet::new();
        for m in &self.models {
            check(names.insert(m.name.as_str()), || format!("models.name: duplicate name {:?}", m.name))?;
            self.validate_model(m)?;
        }
        let windows = self.well_windows();
        for m in &self.models {
            if let Some(r) = m.window_rows {
                let stride = m.image_stride.unwrap_or(1);
                check(windows[&r] == stride, || {
                    format!("models.image_stride: models with window_rows = {r} disagree on the image stride")
                })?;
            }
        }
        if let Some(e) = &self.ensemble {
            self.validate_ensemble(e)?;
        }
        Ok(())
    }

    fn validate_model(&self, m: &ModelConfig) -> Result<()> {
        let at = |field: &str| format!("models[{}].{field}", m.name);
        check(!m.name.is_empty() && m.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'), || {
            format!("{}: use letters, digits, '_' or '-'", at("name"))
        })?;
        check(m.name != crate::experiment::ENSEMBLE, || format!("{}: {:?} is reserved", at("name"), m.name))?;
        check(!m.hidden.is_empty() && m.hidden.iter().all(|&w| w > 0), || {
            format!("{}: need at least one hidden layer, all widths > 0", at("hidden"))
        })?;
        let matrices = m.hidden.len() + 1;
        check(m.l2_lambda.is_empty() || m.l2_lambda.len() == matrices, || {
            format!("{}: expected {matrices} coefficients, got {}", at("l2_lambda"), m.l2_lambda.len())
        })?;
        check(m.l2_lambda.iter().all(|&l| l >= 0.0 && l.is_finite()), || format!("{}: must be >= 0", at("l2_lambda")))?;
        validate_train(&m.train, &at("train"))?;
        if let NormConfig::Uniform { scale, shift } = m.norm {
            check(scale > 0.0 && scale.is_finite() && shift.is_finite(), || {
                format!("{}: uniform scale must be > 0", at("norm"))
            })?;
        }
        if let Some(s) = &m.sparsity {
            check(s.layer < m.hidden.len(), || format!("{}: layer {} is not a hidden layer", at("sparsity"), s.layer))?;
            check(s.target > 0.0 && s.target < 1.0, || format!("{}: target must lie in (0, 1)", at("sparsity")))?;
            check(s.weight >= 0.0, || format!("{}: weight must be >= 0", at("sparsity")))?;
        }
        if m.method.is_stacked() {
            check(m.hidden.len() % 2 == 1, || {
                format!("{}: stacked models need an odd number of layers", at("hidden"))
            })?;
            let p = m
                .pretrain
                .as_ref()
                .ok_or_else(|| Error::config(format!("{}: required for SDA/SDA-R", at("pretrain"))))?;
            validate_train(&p.train(), &at("pretrain"))?;
            let stages = m.hidden.len().div_ceil(2);
            check(p.l2_lambda.is_empty() || p.l2_lambda.len() == stages, || {
                format!("{}: expected {stages} per-stage coefficients", at("pretrain.l2_lambda"))
            })?;
            check(p.l2_lambda.iter().all(|&l| l >= 0.0), || format!("{}: must be >= 0", at("pretrain.l2_lambda")))?;
            check(m.sparsity.is_none(), || format!("{}: not supported for stacked models", at("sparsity")))?;
        } else {
            check(m.pretrain.is_none(), || format!("{}: only SDA/SDA-R models pretrain", at("pretrain")))?;
        }
        match (m.method, &m.perturb) {
            (Method::SdaR, None) => return Err(Error::config(format!("{}: required for SDA-R", at("perturb")))),
            (Method::SdaR, Some(p)) => {
                check(in_unit(p.fraction) && p.magnitude >= 0.0, || {
                    format!("{}: fraction in [0, 1] and magnitude >= 0", at("perturb"))
                })?;
            }
            (_, Some(_)) => return Err(Error::config(format!("{}: only SDA-R models perturb", at("perturb")))),
            (_, None) => {}
        }
        if self.kind == ExperimentKind::Well {
            let len = self.well().suite_len;
            let r = m
                .window_rows
                .ok_or_else(|| Error::config(format!("{}: required for well models", at("window_rows"))))?;
            check(r >= 1 && r <= len, || format!("{}: must lie in 1..={len}", at("window_rows")))?;
            check(m.image_stride.unwrap_or(1) >= 1, || format!("{}: must be >= 1", at("image_stride")))?;
        } else {
            check(m.window_rows.is_none() && m.image_stride.is_none(), || {
                format!("{}: only well models take window_rows/image_stride", at("window_rows"))
            })?;
        }
        Ok(())
    }

    fn validate_ensemble(&self, e: &EnsembleConfig) -> Result<()> {
        check(!e.members.is_empty(), || "ensemble.members: empty".into())?;
        check(e.members.len() == e.weights.len(), || {
            format!("ensemble.weights: {} weights for {} members", e.weights.len(), e.members.len())
        })?;
        for name in &e.members {
            check(self.model(name).is_some(), || format!("ensemble.members: no model named {name:?}"))?;
        }
        crate::ensemble::check_weights(&e.weights).map_err(|msg| Error::config(format!("ensemble.weights: {msg}")))
    }
}

fn validate_train(t: &TrainConfig, at: &str) -> Result<()> {
    check(t.learning_rate > 0.0 && t.learning_rate.is_finite(), || format!("{at}.learning_rate: must be > 0"))?;
    check(t.batch_size >= 1, || format!("{at}.batch_size: must be >= 1"))
}

impl MathConfig {
    fn validate(&self) -> Result<()> {
        check(in_unit(self.noisy_fraction), || "math.noisy_fraction: must lie in [0, 1]".into())?;
        check(self.train_level >= 0.0, || "math.train_level: must be >= 0".into())?;
        check(self.test_min_level >= 0.0 && self.test_min_level <= self.test_max_level, || {
            "math.test_min_level: need 0 <= test_min_level <= test_max_level".into()
        })
    }
}

impl SpConfig {
    fn validate(&self) -> Result<()> {
        check(in_unit(self.noisy_fraction), || "sp.noisy_fraction: must lie in [0, 1]".into())?;
        check(in_unit(self.noisy_point_fraction), || "sp.noisy_point_fraction: must lie in [0, 1]".into())?;
        check(self.level >= 0.0, || "sp.level: must be >= 0".into())
    }
}

impl SeismicConfig {
    fn validate(&self) -> Result<()> {
        check(self.time_samples >= 1 && self.dt > 0.0, || "seismic.time_samples/dt: must be positive".into())?;
        check(self.patch_cols >= 1 && self.patch_cols <= self.train_traces.min(self.test_traces), || {
            format!(
                "seismic.patch_cols: must lie in 1..={} (the narrowest section)",
                self.train_traces.min(self.test_traces)
            )
        })?;
        check(self.train_sections >= 1 || self.clean_patches == 0, || "seismic.train_sections: must be >= 1".into())?;
        check(self.fmin_hz > 0.0 && self.fmin_hz <= self.fmax_hz, || {
            "seismic.fmin_hz: need 0 < fmin_hz <= fmax_hz".into()
        })?;
        let nyquist = 0.5 / self.dt;
        check(self.fmax_hz < nyquist, || format!("seismic.fmax_hz: must stay below Nyquist ({nyquist} Hz)"))?;
        check(self.corrupted_traces <= self.test_traces, || "seismic.corrupted_traces: more than test_traces".into())
    }
}

impl WellConfig {
    fn validate(&self) -> Result<()> {
        check(self.suite_len >= 1, || "well.suite_len: must be >= 1".into())?;
        check(self.max_adjacent_change > 0.0, || "well.max_adjacent_change: must be > 0".into())?;
        check(
            in_unit(self.min_fraction) && in_unit(self.max_fraction) && self.min_fraction <= self.max_fraction,
            || "well.min_fraction/max_fraction: need 0 <= min <= max <= 1".into(),
        )?;
        check(in_unit(self.mute_probability), || "well.mute_probability: must lie in [0, 1]".into())?;
        check(in_unit(self.test_fraction), || "well.test_fraction: must lie in [0, 1]".into())
    }
}
