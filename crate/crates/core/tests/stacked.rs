use sdae_core::autoencoder::{build, AutoencoderSpec};
use sdae_core::datagen::{sp_dataset, SpDatasetConfig};
use sdae_core::nn::{evaluate_loss, Affine, Network, SampleSet, TrainSpec};
use sdae_core::stacked::{assemble, perturb_weights, pretrain, StackPlan, StageResult};

fn data(n: usize, seed: u64) -> (SampleSet, SampleSet) {
    let set = sp_dataset(&SpDatasetConfig::training(n), seed).unwrap();
    let mut scaled = SampleSet::new(17);
    for i in 0..set.len() {
        let m = set.corrupted(i).iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-12);
        let c: Vec<f64> = set.clean(i).iter().map(|v| v / m).collect();
        let x: Vec<f64> = set.corrupted(i).iter().map(|v| v / m).collect();
        scaled.push(&c, &x, set.is_noisy(i)).unwrap();
    }
    scaled.split(0.8)
}

fn plan(hidden: &[usize], epochs: usize) -> StackPlan {
    let spec = TrainSpec {
        learning_rate: 0.05,
        max_epochs: epochs,
        batch_size: 32,
        early_stop_patience: 0,
        ..TrainSpec::default()
    };
    StackPlan {
        hidden_dims: hidden.to_vec(),
        stage_specs: vec![spec.clone(); hidden.len().div_ceil(2)],
        finetune: spec,
        perturb: None,
    }
}

fn template(hidden: &[usize], train: &SampleSet, seed: u64) -> Network {
    let mut net = build(&AutoencoderSpec::new(17, hidden), seed).unwrap();
    net.set_input_norm(Affine::standardize(train.corrupted_block(), 17).unwrap()).unwrap();
    net.set_output_norm(Affine::standardize(train.clean_block(), 17).unwrap()).unwrap();
    net
}

/// Encoders in, decoders out, evaluated layer by layer from the stage networks.
fn nested(stages: &[StageResult], x: &[f64]) -> Vec<f64> {
    let first = &stages[0].network;
    let mut a = first.input_norm().normalize(x);
    for s in stages {
        a = s.encoder().forward(&a);
    }
    for s in stages.iter().rev() {
        a = s.decoder().forward(&a);
    }
    first.output_norm().denormalize(&a)
}

#[test]
fn stage_counts_and_lossless_assembly() {
    let (tr, va) = data(300, 1);
    for hidden in [vec![6], vec![8, 5, 8], vec![9, 7, 5, 7, 9], vec![10, 8, 6, 4, 6, 8, 10]] {
        let p = plan(&hidden, 3);
        let stages = pretrain(&p, &template(&hidden, &tr, 0), &tr, &va, 5).unwrap();
        assert_eq!(stages.len(), hidden.len().div_ceil(2));
        let net = assemble(&p, &stages).unwrap();
        assert_eq!(net.dims(), [vec![17], hidden.clone(), vec![17]].concat());
        for i in 0..20 {
            let x = va.corrupted(i);
            let (a, b) = (net.forward(x).unwrap(), nested(&stages, x));
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()), "{hidden:?}: {u} vs {v}");
            }
        }
    }
}

#[test]
fn perturbation_touches_exact_share_within_bound() {
    let (tr, va) = data(200, 2);
    let hidden = [20, 25, 30, 25, 20];
    let p = plan(&hidden, 1);
    let net = assemble(&p, &pretrain(&p, &template(&hidden, &tr, 0), &tr, &va, 1).unwrap()).unwrap();
    for seed in 0..5 {
        let out = perturb_weights(&net, 0.1, 0.05, seed).unwrap();
        for (a, b) in net.layers().iter().zip(out.layers()) {
            let count = a.weights().len();
            let changed: Vec<(f64, f64)> =
                a.weights().iter().zip(b.weights()).filter(|(u, v)| u != v).map(|(u, v)| (*u, *v)).collect();
            assert_eq!(changed.len(), (0.1 * count as f64 - 1e-9).ceil() as usize);
            assert!(changed.iter().all(|(u, v)| (v - u).abs() <= 0.05 * u.abs() * (1.0 + 1e-12)));
            assert_eq!(a.biases(), b.biases());
        }
    }
}

#[test]
fn pretraining_beats_random_start_in_median() {
    let hidden = [20, 25, 30, 25, 20];
    let mut pre = Vec::new();
    let mut random = Vec::new();
    for seed in 0..10 {
        let (tr, va) = data(600, 100 + seed);
        let t = template(&hidden, &tr, seed);
        let p = plan(&hidden, 30);
        let net = assemble(&p, &pretrain(&p, &t, &tr, &va, seed).unwrap()).unwrap();
        pre.push(evaluate_loss(&net, &va).unwrap());
        random.push(evaluate_loss(&t, &va).unwrap());
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        0.5 * (v[4] + v[5])
    };
    let (p, r) = (median(&mut pre), median(&mut random));
    assert!(p < r, "pretrained {p} vs random {r}");
}
