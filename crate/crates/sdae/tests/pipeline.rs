use proptest::prelude::*;
use sdae::config::{self, ExperimentConfig, Method, PerturbConfig, PretrainConfig};
use sdae::core::Matrix;
use sdae::ensemble::combine;
use sdae::experiment::{self, Layout};
use sdae::format;

fn small_sp() -> ExperimentConfig {
    let mut cfg = config::parse(
        &std::fs::read_to_string(format!("{}/../../configs/sp.toml", env!("CARGO_MANIFEST_DIR"))).unwrap(),
    )
    .unwrap();
    let mut sp = cfg.sp();
    sp.train_count = 200;
    sp.test_count = 20;
    cfg.sp = Some(sp);
    cfg.models.retain(|m| m.name == "sda" || m.name == "sda-r");
    for m in &mut cfg.models {
        m.hidden = vec![8, 6, 8];
        m.l2_lambda = vec![0.01; 4];
        m.train.max_epochs = 3;
        m.pretrain = Some(PretrainConfig { max_epochs: 2, ..m.pretrain.clone().unwrap() });
    }
    cfg.validate().unwrap();
    cfg
}

#[test]
fn perturbed_model_differs_from_plain_only_by_perturbation_and_finetuning() {
    let mut cfg = small_sp();
    for m in &mut cfg.models {
        m.train.max_epochs = 0;
    }
    let tmp = tempfile::tempdir().unwrap();
    experiment::generate(&cfg, tmp.path()).unwrap();
    let trained = experiment::train(&cfg, tmp.path()).unwrap();
    let (sda, sdar) = (&trained[0].network, &trained[1].network);
    assert_eq!(trained[0].stage_histories, trained[1].stage_histories);
    let mut changed = 0;
    for (a, b) in sda.layers().iter().zip(sdar.layers()) {
        let n = a.weights().iter().zip(b.weights()).filter(|(u, v)| u != v).count();
        assert_eq!(n, (0.1 * a.weights().len() as f64).ceil() as usize);
        changed += n;
        assert_eq!(a.biases(), b.biases());
    }
    assert!(changed > 0);
}

#[test]
fn pipeline_is_deterministic_and_model_files_round_trip() {
    let cfg = small_sp();
    let run = |dir: &std::path::Path| {
        experiment::generate(&cfg, dir).unwrap();
        let trained = experiment::train(&cfg, dir).unwrap();
        (trained, experiment::denoise(&cfg, dir).unwrap())
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ta, ra) = run(a.path());
    let (tb, rb) = run(b.path());
    assert_eq!(ta, tb);
    assert_eq!(ra.to_text(), rb.to_text());
    let layout = Layout::new(a.path());
    for t in &ta {
        let bytes = std::fs::read(layout.model(&t.name)).unwrap();
        assert_eq!(bytes, std::fs::read(Layout::new(b.path()).model(&t.name)).unwrap());
        assert_eq!(format::load_model(layout.model(&t.name)).unwrap(), t.network);
        assert_eq!(format::encode_model(&t.network), bytes);
    }
    assert!(layout.stage("sda", 1).is_file() && layout.stage("sda", 2).is_file());
}

#[test]
fn perturbation_config_offsets_the_run_seed() {
    let p = PerturbConfig { fraction: 0.1, magnitude: 0.05, seed: 77 };
    assert_eq!(p.resolve(10).seed, 87);
    assert!(Method::SdaR.is_stacked() && !Method::Da.is_stacked());
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-10.0f64..10.0, rows * cols).prop_map(move |v| Matrix::from_vec(rows, cols, v).unwrap())
}

proptest! {
    #[test]
    fn ensemble_is_linear_in_member_outputs(a in matrix(3, 4), b in matrix(3, 4), c in matrix(3, 4), w in 0.0f64..1.0, s in -3.0f64..3.0) {
        let weights = [w, 1.0 - w];
        let scaled = |m: &Matrix, k: f64| Matrix::from_vec(3, 4, m.as_slice().iter().map(|v| v * k).collect()).unwrap();
        let sum = |x: &Matrix, y: &Matrix| Matrix::from_vec(3, 4, x.as_slice().iter().zip(y.as_slice()).map(|(u, v)| u + v).collect()).unwrap();
        let lhs = combine(&[sum(&a, &scaled(&c, s)), b.clone()], &weights).unwrap();
        let rhs = sum(&combine(&[a.clone(), b.clone()], &weights).unwrap(), &scaled(&c, s * w));
        for (x, y) in lhs.as_slice().iter().zip(rhs.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
        let out = combine(&[a.clone(), b.clone()], &weights).unwrap();
        for ((o, x), y) in out.as_slice().iter().zip(a.as_slice()).zip(b.as_slice()) {
            prop_assert!(*o >= x.min(*y) - 1e-12 && *o <= x.max(*y) + 1e-12);
        }
    }
}
