use std::path::Path;
use std::process::{Command, Output};

use sdae::config;
use sdae::core::autoencoder::{build, AutoencoderSpec};
use sdae::experiment::Layout;
use sdae::format;

fn sdae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdae")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = sdae(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// A small SP experiment: one SA model with a 12-unit hidden layer.
fn small_sp(dir: &Path, extra: &str) -> std::path::PathBuf {
    let text = format!(
        r#"schema_version = 1
kind = "sp"
split = 0.8

[sp]
train_count = {train}
test_count = 20

[[models]]
name = "sa12"
method = "SA"
hidden = [12]
norm = "standardize"
train = {{ learning_rate = 0.05, max_epochs = {epochs}, batch_size = 16 }}
"#,
        train = if extra.contains("empty") { 0 } else { 200 },
        epochs = if extra.contains("no-epochs") { 0 } else { 5 },
    );
    let path = dir.join("sp.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn sa12_on_sp_maps_seventeen_to_twelve_to_seventeen() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_sp(tmp.path(), "");
    let run = tmp.path().join("run");
    let (c, r) = (cfg.to_str().unwrap(), run.to_str().unwrap());
    run_ok(&["generate", "--config", c, "--out", r]);
    run_ok(&["train", "--config", c, "--out", r]);
    let net = format::load_model(Layout::new(&run).model("sa12")).unwrap();
    assert_eq!(net.dims(), vec![17, 12, 17]);
    let report = run_ok(&["denoise", "--config", c, "--out", r]);
    assert!(report.contains("sa12.mean_eta = "), "{report}");
    assert_eq!(run_ok(&["evaluate", "--config", c, "--out", r]), report);
    run_ok(&["export-plots", "--config", c, "--out", r]);
    let (header, rows) = format::read_csv(run.join("plots/eta_scatter.csv")).unwrap();
    assert!(header.contains(&"eta_sa12".to_string()));
    assert_eq!(rows.len(), 20);
}

#[test]
fn empty_training_set_writes_header_only_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_sp(tmp.path(), "empty");
    let run = tmp.path().join("run");
    run_ok(&["generate", "--csv", "--config", cfg.to_str().unwrap(), "--out", run.to_str().unwrap()]);
    let set = format::load_dataset(Layout::new(&run).train_set(None)).unwrap();
    assert_eq!((set.len(), set.dim()), (0, 17));
    let (header, rows) = format::read_csv(run.join("train.csv")).unwrap();
    assert_eq!(header.len(), 2 + 2 * 17);
    assert!(rows.is_empty());
}

#[test]
fn zero_epochs_returns_the_initial_model() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = small_sp(tmp.path(), "no-epochs");
    let run = tmp.path().join("run");
    let (c, r) = (cfg_path.to_str().unwrap(), run.to_str().unwrap());
    run_ok(&["generate", "--config", c, "--out", r]);
    run_ok(&["train", "--config", c, "--out", r]);
    let layout = Layout::new(&run);
    let net = format::load_model(layout.model("sa12")).unwrap();
    let fresh = build(&AutoencoderSpec::new(17, &[12]), 0).unwrap();
    for (a, b) in net.layers().iter().zip(fresh.layers()) {
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.biases(), b.biases());
    }
    let (_, rows) = format::read_csv(layout.history("sa12")).unwrap();
    assert!(rows.is_empty());
    let _ = config::load(&cfg_path).unwrap();
}

#[test]
fn exit_codes_separate_config_and_io_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "schema_version = 1\nkind = \"sp\"\nsplit = 2.0\n").unwrap();
    let out = sdae(&["generate", "--config", bad.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("split"));

    let out = sdae(&["generate", "--config", tmp.path().join("nope.toml").to_str().unwrap(), "--out", "x"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_run_directory_lists_the_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_sp(tmp.path(), "");
    let run = tmp.path().join("never-generated");
    let out = sdae(&["train", "--config", cfg.to_str().unwrap(), "--out", run.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("train.gdds") && err.contains("valid.gdds"), "{err}");

    let out = sdae(&["denoise", "--config", cfg.to_str().unwrap(), "--out", run.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sa12.gdae"));
}

#[test]
fn seed_flag_changes_the_data_and_repeats_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_sp(tmp.path(), "");
    let c = cfg.to_str().unwrap();
    let gen = |name: &str, seed: &str| {
        let dir = tmp.path().join(name);
        run_ok(&["generate", "--config", c, "--seed", seed, "--out", dir.to_str().unwrap()]);
        std::fs::read(Layout::new(&dir).train_set(None)).unwrap()
    };
    let (a, b, other) = (gen("a", "3"), gen("b", "3"), gen("c", "4"));
    assert_eq!(a, b);
    assert_ne!(a, other);
}
