//! The five pipeline steps behind the CLI. Each step reads and writes a run
//! directory laid out by [`Layout`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sdae_core::autoencoder::{build, train_denoiser, AutoencoderSpec};
use sdae_core::datagen::{
    corrupt_traces, corrupt_well_column, math_dataset, random_reflectors, seismic_patches, sp_dataset,
    spaced_trace_indices, synth_seismic, synth_well_suite, well_images, LogColumn, LogScaling, LogSource,
    MathDatasetConfig, RockConstants, SeismicModel, SeismicPatchConfig, SeismicSection, SpDatasetConfig,
    WellImageConfig, WELL_LOGS,
};
use sdae_core::metrics::{eta, evaluate_set, masked_normalized_rms, region_report, EvalReport};
use sdae_core::nn::{predict_block, Affine, LossHistory, Network, SampleSet};
use sdae_core::stacked::{assemble, finetune, perturb_weights, pretrain, StackPlan, StageResult};
use sdae_core::windowing::{denoise_section, WindowSpec};
use sdae_core::Matrix;

use crate::config::{ExperimentConfig, ExperimentKind, Method, ModelConfig, NormConfig, PretrainConfig};
use crate::ensemble::{combine, EnsembleMember, EnsembleSpec};
use crate::error::{CoreContext, Error, Result};
use crate::format;

/// Output name used for the weighted ensemble.
pub const ENSEMBLE: &str = "ensemble";

/// File names inside a run directory.
#[derive(Debug, Clone)]
pub struct Layout {
    dir: PathBuf,
}

impl Layout {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Layout { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn suffix(window_rows: Option<usize>) -> String {
        window_rows.map(|r| format!("_m{r}")).unwrap_or_default()
    }

    pub fn train_set(&self, window_rows: Option<usize>) -> PathBuf {
        self.dir.join(format!("train{}.gdds", Self::suffix(window_rows)))
    }

    pub fn valid_set(&self, window_rows: Option<usize>) -> PathBuf {
        self.dir.join(format!("valid{}.gdds", Self::suffix(window_rows)))
    }

    pub fn test_set(&self) -> PathBuf {
        self.dir.join("test.gdds")
    }

    pub fn model(&self, name: &str) -> PathBuf {
        self.dir.join("models").join(format!("{name}.gdae"))
    }

    /// Checkpoint of pretraining stage `k` (1-based).
    pub fn stage(&self, name: &str, k: usize) -> PathBuf {
        self.dir.join("models").join(format!("{name}.gdae.stage{k}"))
    }

    pub fn history(&self, name: &str) -> PathBuf {
        self.dir.join("models").join(format!("{name}.history.csv"))
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.dir.join("outputs").join(format!("{name}.csv"))
    }

    pub fn report(&self) -> PathBuf {
        self.dir.join("report.txt")
    }

    pub fn plots(&self) -> PathBuf {
        self.dir.join("plots")
    }
}

fn offset(cfg: &ExperimentConfig, seed: u64) -> u64 {
    cfg.seed.wrapping_add(seed)
}

fn require(paths: &[PathBuf]) -> Result<()> {
    let missing: Vec<PathBuf> = paths.iter().filter(|p| !p.is_file()).cloned().collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Missing(missing))
    }
}

/// Dataset files a model trains on.
fn model_window(cfg: &ExperimentConfig, model: &ModelConfig) -> Option<usize> {
    (cfg.kind == ExperimentKind::Well).then_some(model.window_rows).flatten()
}

/// Sliding window a model denoises sections with; `None` for vector experiments.
pub fn model_window_spec(cfg: &ExperimentConfig, model: &ModelConfig) -> Result<Option<WindowSpec>> {
    let spec = match cfg.kind {
        ExperimentKind::Math | ExperimentKind::Sp => return Ok(None),
        ExperimentKind::Seismic => {
            let s = cfg.seismic();
            WindowSpec::new(s.time_samples, s.patch_cols, 1)
        }
        ExperimentKind::Well => WindowSpec::new(model.window_rows.unwrap_or(0), WELL_LOGS, 1),
    };
    spec.context(format!("window of model {}", model.name)).map(Some)
}

/// Artifacts `generate` writes for this config.
pub fn dataset_paths(cfg: &ExperimentConfig, layout: &Layout) -> Vec<PathBuf> {
    let mut paths = Vec::new();
    if cfg.kind == ExperimentKind::Well {
        for r in cfg.well_windows().keys() {
            paths.push(layout.train_set(Some(*r)));
            paths.push(layout.valid_set(Some(*r)));
        }
    } else {
        paths.push(layout.train_set(None));
        paths.push(layout.valid_set(None));
    }
    paths.push(layout.test_set());
    paths
}

fn seismic_section(cfg: &ExperimentConfig, seed: u64, traces: usize) -> Result<SeismicSection> {
    let s = cfg.seismic();
    let model = SeismicModel {
        reflectors: random_reflectors(s.time_samples, s.reflectors, seed),
        wavelet_freq_hz: s.wavelet_freq_hz,
        dt: s.dt,
        time_samples: s.time_samples,
        traces,
        max_dip: s.max_dip,
        seed,
    };
    Ok(synth_seismic(&model).context("synthesizing a seismic section")?.normalized_to_peak())
}

/// Writes the training, validation and test sets.
pub fn generate(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let layout = Layout::new(dir);
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut save = |path: PathBuf, set: &SampleSet| -> Result<()> {
        format::save_dataset(&path, set)?;
        written.push(path);
        Ok(())
    };
    let save_split =
        |window: Option<usize>, set: &SampleSet, save: &mut dyn FnMut(PathBuf, &SampleSet) -> Result<()>| {
            let (train, valid) = set.split(cfg.split);
            save(layout.train_set(window), &train)?;
            save(layout.valid_set(window), &valid)
        };
    match cfg.kind {
        ExperimentKind::Math => {
            let m = cfg.math();
            let train = MathDatasetConfig {
                count: m.train_count,
                noisy_fraction: m.noisy_fraction,
                min_level: m.train_level,
                max_level: m.train_level,
            };
            let all = math_dataset(&train, offset(cfg, m.train_seed)).context("generating the math training set")?;
            save_split(None, &all, &mut save)?;
            let test = MathDatasetConfig {
                count: m.test_count,
                noisy_fraction: 1.0,
                min_level: m.test_min_level,
                max_level: m.test_max_level,
            };
            let test = math_dataset(&test, offset(cfg, m.test_seed)).context("generating the math test set")?;
            save(layout.test_set(), &test)?;
        }
        ExperimentKind::Sp => {
            let s = cfg.sp();
            let train = SpDatasetConfig {
                count: s.train_count,
                noisy_fraction: s.noisy_fraction,
                level: s.level,
                noisy_point_fraction: s.noisy_point_fraction,
            };
            let all = sp_dataset(&train, offset(cfg, s.train_seed)).context("generating the SP training set")?;
            save_split(None, &all, &mut save)?;
            let test = SpDatasetConfig { count: s.test_count, noisy_fraction: 1.0, ..train };
            let test = sp_dataset(&test, offset(cfg, s.test_seed)).context("generating the SP test set")?;
            save(layout.test_set(), &test)?;
        }
        ExperimentKind::Seismic => {
            let s = cfg.seismic();
            let base = offset(cfg, s.section_seed);
            let sections = (0..s.train_sections as u64)
                .map(|i| seismic_section(cfg, base.wrapping_add(i), s.train_traces))
                .collect::<Result<Vec<_>>>()?;
            let patches = SeismicPatchConfig {
                clean_patches: s.clean_patches,
                noisy_per_clean: s.noisy_per_clean,
                patch_rows: s.time_samples,
                patch_cols: s.patch_cols,
                fmin_hz: s.fmin_hz,
                fmax_hz: s.fmax_hz,
            };
            let all =
                seismic_patches(&sections, &patches, offset(cfg, s.patch_seed)).context("cutting seismic patches")?;
            save_split(None, &all, &mut save)?;
            let clean = seismic_section(cfg, offset(cfg, s.test_seed), s.test_traces)?;
            let idx =
                spaced_trace_indices(s.test_traces, s.corrupted_traces, s.min_trace_gap, offset(cfg, s.trace_seed))
                    .context("placing corrupted traces")?;
            let (noisy, _) = corrupt_traces(&clean, &idx, s.fmin_hz, s.fmax_hz, offset(cfg, s.corrupt_seed))
                .context("corrupting the test section")?;
            let mut test = SampleSet::with_shape(s.time_samples, s.test_traces);
            test.push(clean.amplitudes().as_slice(), noisy.amplitudes().as_slice(), true).context("test section")?;
            save(layout.test_set(), &test)?;
        }
        ExperimentKind::Well => {
            let w = cfg.well();
            let rock = RockConstants::default();
            let mut raw = Vec::new();
            for (k, source) in LogSource::ALL.iter().enumerate() {
                let seed = offset(cfg, w.train_seed).wrapping_add(k as u64);
                raw.extend(
                    synth_well_suite(
                        &source.ranges(),
                        w.suite_len,
                        w.suites_per_source,
                        w.max_adjacent_change,
                        &rock,
                        seed,
                    )
                    .context("synthesizing training well logs")?,
                );
            }
            let scaling = LogScaling::fit(&raw).context("fitting log scaling")?;
            let suites: Vec<_> = raw.iter().map(|s| scaling.normalize(s)).collect();
            for (rows, stride) in cfg.well_windows() {
                let mut images = WellImageConfig::new(rows);
                images.stride = stride;
                images.corrupted_copies = w.corrupted_copies;
                images.fraction = (w.min_fraction, w.max_fraction);
                images.mute_probability = w.mute_probability;
                let all = well_images(&suites, &images, offset(cfg, w.image_seed))
                    .context(format!("cutting {rows}-row well images"))?;
                save_split(Some(rows), &all, &mut save)?;
            }
            let source = LogSource::from(w.test_source);
            let test_raw = synth_well_suite(
                &source.ranges(),
                w.suite_len,
                1,
                w.max_adjacent_change,
                &rock,
                offset(cfg, w.test_seed),
            )
            .context("synthesizing the test well")?;
            let clean = scaling.normalize(&test_raw[0]);
            let corrupted = corrupt_well_column(
                &clean,
                w.test_log.into(),
                w.test_corruption.into(),
                w.test_fraction,
                w.test_placement.into(),
                offset(cfg, w.corrupt_seed),
            )
            .context("corrupting the test well")?;
            let mut test = SampleSet::with_shape(w.suite_len, WELL_LOGS);
            test.push(clean.values().as_slice(), corrupted.values().as_slice(), true).context("test well")?;
            save(layout.test_set(), &test)?;
        }
    }
    Ok(written)
}

/// Per-sample peak magnitude of the noisy input, used to bring SP samples of
/// very different amplitude onto one scale.
fn sample_scales(set: &SampleSet) -> Vec<f64> {
    (0..set.len()).map(|i| set.corrupted(i).iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-12)).collect()
}

fn scale_samples(set: &SampleSet, scales: &[f64]) -> Result<SampleSet> {
    let (rows, cols) = set.shape();
    let mut out = SampleSet::with_shape(rows, cols);
    for (i, &f) in scales.iter().enumerate() {
        let clean: Vec<f64> = set.clean(i).iter().map(|v| v / f).collect();
        let noisy: Vec<f64> = set.corrupted(i).iter().map(|v| v / f).collect();
        out.push(&clean, &noisy, set.is_noisy(i)).context("scaling samples")?;
    }
    Ok(out)
}

fn per_sample_scaling(cfg: &ExperimentConfig) -> bool {
    cfg.kind == ExperimentKind::Sp && cfg.sp().per_sample_scaling
}

/// Training data as the network sees it.
fn prepare(cfg: &ExperimentConfig, set: SampleSet) -> Result<SampleSet> {
    if per_sample_scaling(cfg) {
        scale_samples(&set, &sample_scales(&set))
    } else {
        Ok(set)
    }
}

fn norms(norm: NormConfig, train: &SampleSet) -> Result<(Affine, Affine)> {
    let d = train.dim();
    let pair = match norm {
        NormConfig::Identity => (Affine::identity(d), Affine::identity(d)),
        NormConfig::Standardize => (
            Affine::standardize(train.corrupted_block(), d).context("standardizing inputs")?,
            Affine::standardize(train.clean_block(), d).context("standardizing targets")?,
        ),
        NormConfig::Uniform { shift, scale } => {
            let a = Affine::uniform(d, shift, scale).context("uniform normalization")?;
            (a.clone(), a)
        }
    };
    Ok(pair)
}

/// One trained model with its loss curves.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub name: String,
    pub network: Network,
    /// Pretraining histories, one per stage (empty for SA/DA).
    pub stage_histories: Vec<LossHistory>,
    pub history: LossHistory,
}

fn write_history(path: &Path, stages: &[LossHistory], final_history: &LossHistory) -> Result<()> {
    let header: Vec<String> = ["phase", "epoch", "train", "valid"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (k, h) in stages.iter().enumerate() {
        rows.extend(h.epochs.iter().enumerate().map(|(e, l)| [(k + 1) as f64, e as f64, l.train, l.valid]));
    }
    rows.extend(final_history.epochs.iter().enumerate().map(|(e, l)| [0.0, e as f64, l.train, l.valid]));
    format::write_csv(path, &header, rows)
}

struct StageCache {
    key: (Vec<usize>, PretrainConfig, u64, NormConfig, Option<usize>),
    stages: Vec<StageResult>,
}

/// Trains every model in the config, writing models, stage checkpoints and
/// loss histories. Models that share data, widths, pretraining settings and
/// initialization reuse one pretraining run.
pub fn train(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<TrainedModel>> {
    let layout = Layout::new(dir);
    let windows: Vec<Option<usize>> = cfg.models.iter().map(|m| model_window(cfg, m)).collect();
    let mut needed = Vec::new();
    for w in &windows {
        needed.push(layout.train_set(*w));
        needed.push(layout.valid_set(*w));
    }
    needed.dedup();
    require(&needed)?;

    let mut data: Vec<(Option<usize>, SampleSet, SampleSet)> = Vec::new();
    let mut cache: Vec<StageCache> = Vec::new();
    let mut trained = Vec::new();
    for (model, window) in cfg.models.iter().zip(windows) {
        if !data.iter().any(|(w, _, _)| *w == window) {
            let tr = prepare(cfg, format::load_dataset(layout.train_set(window))?)?;
            let va = prepare(cfg, format::load_dataset(layout.valid_set(window))?)?;
            data.push((window, tr, va));
        }
        let (_, tr, va) = data.iter().find(|(w, _, _)| *w == window).unwrap();
        let dim = cfg.sample_dim(model);
        if tr.dim() != dim || va.dim() != dim {
            return Err(Error::config(format!(
                "models[{}]: dataset samples have {} values, the model expects {dim}",
                model.name,
                tr.dim()
            )));
        }
        let what = format!("training model {}", model.name);
        let mut template =
            build(&AutoencoderSpec::new(dim, &model.hidden), offset(cfg, model.init_seed)).context(what.clone())?;
        let (input_norm, output_norm) = norms(model.norm, tr)?;
        template.set_input_norm(input_norm).context(what.clone())?;
        template.set_output_norm(output_norm).context(what.clone())?;
        let spec = model.train.spec(cfg.seed, model.l2_lambda.clone(), model.sparsity());

        let (network, history, stages) = match model.method {
            Method::Sa | Method::Da => {
                let (net, history) = train_denoiser(&template, tr, va, &spec).context(what)?;
                (net, history, Vec::new())
            }
            Method::Sda | Method::SdaR => {
                let p = model.pretrain.clone().expect("validated: stacked models pretrain");
                let stage_specs = (0..model.hidden.len().div_ceil(2))
                    .map(|k| {
                        let l = p.l2_lambda.get(k).copied().unwrap_or(0.0);
                        p.train().spec(cfg.seed, vec![l, if k == 0 { 0.0 } else { l }], None)
                    })
                    .collect();
                let plan = StackPlan {
                    hidden_dims: model.hidden.clone(),
                    stage_specs,
                    finetune: spec,
                    perturb: model.perturb.map(|q| q.resolve(cfg.seed)),
                };
                let key = (model.hidden.clone(), p, model.init_seed, model.norm, window);
                let stages = match cache.iter().find(|c| c.key == key) {
                    Some(c) => c.stages.clone(),
                    None => {
                        let stages =
                            pretrain(&plan, &template, tr, va, offset(cfg, model.init_seed)).context(what.clone())?;
                        cache.push(StageCache { key, stages: stages.clone() });
                        stages
                    }
                };
                let mut initial = assemble(&plan, &stages).context(what.clone())?;
                if let Some(q) = &plan.perturb {
                    initial = perturb_weights(&initial, q.fraction, q.magnitude, q.seed).context(what.clone())?;
                }
                let (net, history) = finetune(&initial, tr, va, &plan.finetune).context(what)?;
                (net, history, stages)
            }
        };
        for s in &stages {
            format::save_model(layout.stage(&model.name, s.index), &s.network)?;
        }
        let stage_histories: Vec<LossHistory> = stages.into_iter().map(|s| s.history).collect();
        format::save_model(layout.model(&model.name), &network)?;
        write_history(&layout.history(&model.name), &stage_histories, &history)?;
        trained.push(TrainedModel { name: model.name.clone(), network, stage_histories, history });
    }
    Ok(trained)
}

/// Raw network outputs for every test sample, row-major.
pub fn model_outputs(cfg: &ExperimentConfig, model: &ModelConfig, net: &Network, test: &SampleSet) -> Result<Vec<f64>> {
    let expected = cfg.sample_dim(model);
    if net.input_dim() != expected || net.output_dim() != expected {
        return Err(Error::config(format!(
            "models[{}]: the saved network maps {} -> {} values, the config implies {expected}",
            model.name,
            net.input_dim(),
            net.output_dim()
        )));
    }
    let what = format!("denoising with model {}", model.name);
    match model_window_spec(cfg, model)? {
        None if per_sample_scaling(cfg) => {
            let scales = sample_scales(test);
            let scaled = scale_samples(test, &scales)?;
            let mut out = predict_block(net, scaled.corrupted_block()).context(what)?;
            let d = test.dim();
            for (i, f) in scales.iter().enumerate() {
                out[i * d..(i + 1) * d].iter_mut().for_each(|v| *v *= f);
            }
            Ok(out)
        }
        None => predict_block(net, test.corrupted_block()).context(what),
        Some(window) => {
            let (rows, cols) = test.shape();
            let mut out = Vec::with_capacity(test.len() * rows * cols);
            for i in 0..test.len() {
                let section = Matrix::from_vec(rows, cols, test.corrupted(i).to_vec()).context(what.clone())?;
                out.extend_from_slice(denoise_section(&section, &window, net).context(what.clone())?.as_slice());
            }
            Ok(out)
        }
    }
}

fn output_names(cfg: &ExperimentConfig) -> Vec<String> {
    let mut names: Vec<String> = cfg.models.iter().map(|m| m.name.clone()).collect();
    if cfg.ensemble.is_some() {
        names.push(ENSEMBLE.to_string());
    }
    names
}

fn write_output(path: &Path, values: &[f64], dim: usize) -> Result<()> {
    let header: Vec<String> = (0..dim).map(|j| format!("v{j}")).collect();
    format::write_csv(path, &header, values.chunks(dim.max(1)))
}

fn read_output(path: &Path, n: usize, dim: usize) -> Result<Vec<f64>> {
    let (header, rows) = format::read_csv(path)?;
    if header.len() != dim || rows.len() != n {
        return Err(Error::format(
            path,
            format!("expected {n} rows of {dim} values, found {} rows of {}", rows.len(), header.len()),
        ));
    }
    Ok(rows.concat())
}

/// The ensemble as an [`EnsembleSpec`] over the run's model files.
pub fn ensemble_spec(cfg: &ExperimentConfig, layout: &Layout) -> Result<Option<EnsembleSpec>> {
    let Some(e) = &cfg.ensemble else { return Ok(None) };
    let mut members = Vec::new();
    for name in &e.members {
        let model =
            cfg.model(name).ok_or_else(|| Error::config(format!("ensemble.members: no model named {name:?}")))?;
        let window = model_window_spec(cfg, model)?.unwrap_or(WindowSpec { patch_rows: 1, patch_cols: 1, stride: 1 });
        members.push(EnsembleMember { model: layout.model(name), window });
    }
    EnsembleSpec::new(members, e.weights.clone()).map(Some)
}

/// Runs every model (and the ensemble) on the test set, writes the outputs
/// and the evaluation report.
pub fn denoise(cfg: &ExperimentConfig, dir: &Path) -> Result<Report> {
    let layout = Layout::new(dir);
    let mut needed = vec![layout.test_set()];
    needed.extend(cfg.models.iter().map(|m| layout.model(&m.name)));
    require(&needed)?;
    let test = format::load_dataset(layout.test_set())?;
    let dim = test.dim();
    let mut outputs = Vec::new();
    for model in &cfg.models {
        let net = format::load_model(layout.model(&model.name))?;
        let out = model_outputs(cfg, model, &net, &test)?;
        write_output(&layout.output(&model.name), &out, dim)?;
        outputs.push((model.name.clone(), out));
    }
    if let Some(spec) = ensemble_spec(cfg, &layout)? {
        let names = &cfg.ensemble.as_ref().expect("spec implies config").members;
        let combined = match cfg.kind {
            ExperimentKind::Seismic | ExperimentKind::Well => {
                let networks = spec.load()?;
                let (rows, cols) = test.shape();
                let mut combined = Vec::with_capacity(test.len() * dim);
                for i in 0..test.len() {
                    let section = Matrix::from_vec(rows, cols, test.corrupted(i).to_vec()).context("test section")?;
                    combined.extend_from_slice(spec.denoise(&networks, &section)?.0.as_slice());
                }
                combined
            }
            ExperimentKind::Math | ExperimentKind::Sp => {
                let members = names
                    .iter()
                    .map(|n| {
                        let out = &outputs.iter().find(|(m, _)| m == n).expect("validated member").1;
                        Matrix::from_vec(test.len(), dim, out.clone()).context("ensemble member")
                    })
                    .collect::<Result<Vec<_>>>()?;
                combine(&members, &spec.weights)?.as_slice().to_vec()
            }
        };
        write_output(&layout.output(ENSEMBLE), &combined, dim)?;
    }
    evaluate(cfg, dir)
}

/// Scores of one output against the clean test data.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputReport {
    pub name: String,
    pub eval: EvalReport,
    /// Efficiency of every test sample (NaN where the input carried no noise).
    pub eta: Vec<f64>,
    /// Corrupt-region RMS error over the unit range of normalized logs (well runs).
    pub masked_normalized_rms: Option<f64>,
    /// Residual energy left in the corrupted region relative to the noise put in
    /// (section runs).
    pub corrupt_energy_ratio: Option<f64>,
    /// Clean-region RMS change relative to the RMS of the clean reference
    /// (section runs).
    pub clean_rms_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: ExperimentKind,
    pub n_test: usize,
    pub outputs: Vec<OutputReport>,
}

impl Report {
    pub fn output(&self, name: &str) -> Option<&OutputReport> {
        self.outputs.iter().find(|o| o.name == name)
    }

    /// `key = value` lines; values use the shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind = {}", self.kind.name());
        let _ = writeln!(s, "n_test = {}", self.n_test);
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |v| v.to_string());
        for o in &self.outputs {
            let e = &o.eval;
            let _ = writeln!(s, "{}.mean_eta = {}", o.name, opt(e.mean_eta));
            let _ = writeln!(s, "{}.eta_samples = {}", o.name, e.per_sample_eta.len());
            let _ = writeln!(s, "{}.mse_clean_region = {}", o.name, opt(e.mse_clean_region));
            let _ = writeln!(s, "{}.mse_corrupt_region = {}", o.name, opt(e.mse_corrupt_region));
            let _ = writeln!(s, "{}.max_clean_change = {}", o.name, opt(e.max_clean_change));
            let _ = writeln!(s, "{}.masked_normalized_rms = {}", o.name, opt(o.masked_normalized_rms));
            let _ = writeln!(s, "{}.corrupt_energy_ratio = {}", o.name, opt(o.corrupt_energy_ratio));
            let _ = writeln!(s, "{}.clean_rms_change = {}", o.name, opt(o.clean_rms_change));
        }
        s
    }
}

/// Corrupted cells of a test sample. Section runs mark whole traces (every
/// cell of a trace that was touched anywhere); well runs mark single cells.
pub fn corruption_mask(kind: ExperimentKind, set: &SampleSet, i: usize) -> Vec<bool> {
    let (x, xt) = (set.clean(i), set.corrupted(i));
    let cell: Vec<bool> = x.iter().zip(xt).map(|(a, b)| a != b).collect();
    if kind != ExperimentKind::Seismic {
        return cell;
    }
    let (rows, cols) = set.shape();
    let touched: Vec<bool> = (0..cols).map(|c| (0..rows).any(|r| cell[r * cols + c])).collect();
    (0..rows * cols).map(|k| touched[k % cols]).collect()
}

fn score(cfg: &ExperimentConfig, test: &SampleSet, name: &str, out: &[f64]) -> Result<OutputReport> {
    let d = test.dim();
    let what = format!("evaluating {name}");
    let eta_of = |i: usize| eta(test.clean(i), test.corrupted(i), &out[i * d..(i + 1) * d]).unwrap_or(f64::NAN);
    let eta_all: Vec<f64> = (0..test.len()).map(eta_of).collect();
    let mut report = OutputReport {
        name: name.to_string(),
        eval: EvalReport::default(),
        eta: eta_all,
        masked_normalized_rms: None,
        corrupt_energy_ratio: None,
        clean_rms_change: None,
    };
    match cfg.kind {
        ExperimentKind::Math | ExperimentKind::Sp => {
            report.eval = evaluate_set(test, out).context(what)?;
        }
        ExperimentKind::Seismic | ExperimentKind::Well => {
            let mask: Vec<bool> = (0..test.len()).flat_map(|i| corruption_mask(cfg.kind, test, i)).collect();
            let (x, xt) = (test.clean_block(), test.corrupted_block());
            report.eval = region_report(x, xt, out, &mask).context(what.clone())?;
            report.eval.n_samples = test.len();
            let (mut residual, mut noise) = (0.0, 0.0);
            for k in (0..x.len()).filter(|&k| mask[k]) {
                residual += (out[k] - x[k]).powi(2);
                noise += (xt[k] - x[k]).powi(2);
            }
            if cfg.kind == ExperimentKind::Seismic {
                report.corrupt_energy_ratio = (noise > 0.0).then(|| residual / noise);
                let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt();
                report.clean_rms_change = report.eval.mse_clean_region.filter(|_| rms > 0.0).map(|m| m.sqrt() / rms);
            } else {
                report.masked_normalized_rms = masked_normalized_rms(x, out, &mask, 1.0).context(what)?;
            }
        }
    }
    Ok(report)
}

/// Scores the saved outputs and writes `report.txt`.
pub fn evaluate(cfg: &ExperimentConfig, dir: &Path) -> Result<Report> {
    let layout = Layout::new(dir);
    let names = output_names(cfg);
    let mut needed = vec![layout.test_set()];
    needed.extend(names.iter().map(|n| layout.output(n)));
    require(&needed)?;
    let test = format::load_dataset(layout.test_set())?;
    let outputs = names
        .iter()
        .map(|n| {
            let out = read_output(&layout.output(n), test.len(), test.dim())?;
            score(cfg, &test, n, &out)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = Report { kind: cfg.kind, n_test: test.len(), outputs };
    let path = layout.report();
    fs::write(&path, report.to_text()).map_err(|e| Error::io(&path, e))?;
    Ok(report)
}

/// Everything `export-plots` reads.
pub fn plot_inputs(cfg: &ExperimentConfig, layout: &Layout) -> Vec<PathBuf> {
    let mut paths = vec![layout.test_set(), layout.report()];
    paths.extend(output_names(cfg).iter().map(|n| layout.output(n)));
    paths
}

fn names_header(prefix: &[&str], names: &[String], tag: &str) -> Vec<String> {
    let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    h.extend(names.iter().map(|n| format!("{tag}{n}")));
    h
}

/// Writes plot-ready CSV files under `plots/` and returns their paths.
///
/// - vector runs: `eta_scatter.csv` (one row per test sample) and
///   `overlays.csv` (clean, noisy and every corrected curve per point);
/// - seismic runs: `section_clean.csv`, `section_noisy.csv`,
///   `section_corrected.csv`, `section_residual.csv`;
/// - well runs: `log_tracks.csv` with per-log clean, corrupted, corrected,
///   error and mask columns.
///
/// Section grids and tracks show the ensemble when there is one, otherwise
/// the first model.
pub fn export_plots(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let layout = Layout::new(dir);
    require(&plot_inputs(cfg, &layout))?;
    let test = format::load_dataset(layout.test_set())?;
    let (n, d) = (test.len(), test.dim());
    let names = output_names(cfg);
    let outputs = names.iter().map(|name| read_output(&layout.output(name), n, d)).collect::<Result<Vec<_>>>()?;
    let plots = layout.plots();
    let mut written = Vec::new();
    match cfg.kind {
        ExperimentKind::Math | ExperimentKind::Sp => {
            let path = plots.join("eta_scatter.csv");
            let header = names_header(&["sample", "noisy", "noise_energy"], &names, "eta_");
            let rows = (0..n).map(|i| {
                let noise: f64 = test.clean(i).iter().zip(test.corrupted(i)).map(|(a, b)| (a - b) * (a - b)).sum();
                let mut row = vec![i as f64, f64::from(u8::from(test.is_noisy(i))), noise];
                row.extend(
                    outputs
                        .iter()
                        .map(|o| eta(test.clean(i), test.corrupted(i), &o[i * d..(i + 1) * d]).unwrap_or(f64::NAN)),
                );
                row
            });
            format::write_csv(&path, &header, rows)?;
            written.push(path);

            let path = plots.join("overlays.csv");
            let header = names_header(&["sample", "point", "clean", "noisy"], &names, "corrected_");
            let rows = (0..n).flat_map(|i| {
                let outputs = &outputs;
                let test = &test;
                (0..d).map(move |k| {
                    let mut row = vec![i as f64, k as f64, test.clean(i)[k], test.corrupted(i)[k]];
                    row.extend(outputs.iter().map(|o| o[i * d + k]));
                    row
                })
            });
            format::write_csv(&path, &header, rows)?;
            written.push(path);
        }
        ExperimentKind::Seismic => {
            let (rows, cols) = test.shape();
            let shown = if cfg.ensemble.is_some() { outputs.len() - 1 } else { 0 };
            let corrected = &outputs[shown];
            let residual: Vec<f64> = corrected[..d].iter().zip(test.clean(0)).map(|(z, x)| z - x).collect();
            let header: Vec<String> = (0..cols).map(|c| format!("trace_{c}")).collect();
            for (tag, grid) in [
                ("clean", test.clean(0)),
                ("noisy", test.corrupted(0)),
                ("corrected", &corrected[..d]),
                ("residual", &residual[..]),
            ] {
                let path = plots.join(format!("section_{tag}.csv"));
                format::write_csv(&path, &header, grid.chunks(cols).take(rows))?;
                written.push(path);
            }
            let note = plots.join("section_source.txt");
            fs::write(&note, format!("corrected = {}\n", names[shown])).map_err(|e| Error::io(&note, e))?;
            written.push(note);
        }
        ExperimentKind::Well => {
            let shown = if cfg.ensemble.is_some() { outputs.len() - 1 } else { 0 };
            let mask = corruption_mask(cfg.kind, &test, 0);
            let mut header = vec!["depth".to_string()];
            for log in LogColumn::ALL {
                let l = log.name().to_lowercase();
                header
                    .extend(["clean", "corrupted", "corrected", "error", "masked"].iter().map(|t| format!("{l}_{t}")));
                header.extend(names.iter().map(|n| format!("{l}_{n}")));
            }
            let rows = (0..test.shape().0).map(|r| {
                let mut row = vec![r as f64];
                for log in LogColumn::ALL {
                    let k = r * WELL_LOGS + log.index();
                    let (x, xt, z) = (test.clean(0)[k], test.corrupted(0)[k], outputs[shown][k]);
                    row.extend([x, xt, z, z - x, f64::from(u8::from(mask[k]))]);
                    row.extend(outputs.iter().map(|o| o[k]));
                }
                row
            });
            let path = plots.join("log_tracks.csv");
            format::write_csv(&path, &header, rows)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Generate, train and denoise in one go.
pub fn run_all(cfg: &ExperimentConfig, dir: &Path) -> Result<Report> {
    generate(cfg, dir)?;
    train(cfg, dir)?;
    denoise(cfg, dir)
}
