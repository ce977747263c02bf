use proptest::prelude::*;
use rand::Rng;
use sdae_core::nn::backprop;
use sdae_core::nn::gradcheck::{audit_gradients, finite_difference_gradient, relative_error, AUDIT_STEP};
use sdae_core::nn::{Activation, Affine, DenseLayer, Network};
use sdae_core::rng_from_seed;

/// Random network with 1..=4 layers of 1..=12 units, sigmoid hidden layers and
/// a sigmoid or linear output.
fn random_network(seed: u64) -> (Network, Vec<f64>, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let depth = rng.gen_range(1..=4);
    let dims: Vec<usize> = (0..=depth).map(|_| rng.gen_range(1..=12)).collect();
    let layers = (0..depth)
        .map(|l| {
            let act = if l + 1 < depth || rng.gen_bool(0.5) { Activation::Sigmoid } else { Activation::Linear };
            DenseLayer::glorot(dims[l], dims[l + 1], act, &mut rng).unwrap()
        })
        .collect();
    let d_in = dims[0];
    let d_out = dims[depth];
    let input_norm = Affine::new(
        (0..d_in).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        (0..d_in).map(|_| rng.gen_range(0.5..2.0)).collect(),
    )
    .unwrap();
    let output_norm = Affine::new(
        (0..d_out).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        (0..d_out).map(|_| rng.gen_range(0.5..2.0)).collect(),
    )
    .unwrap();
    let net = Network::with_norms(layers, input_norm, output_norm).unwrap();
    let x = (0..d_in).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let t = (0..d_out).map(|_| rng.gen_range(-2.0..2.0)).collect();
    (net, x, t)
}

#[test]
fn hundred_random_networks_pass_the_audit() {
    for seed in 0..100 {
        let (net, x, t) = random_network(seed);
        let audit = audit_gradients(&net, &x, &t, AUDIT_STEP).unwrap();
        assert!(audit.max_relative_error <= 1e-6, "seed {seed}: {audit:?}");
        assert_eq!(audit.entries, net.parameter_count());
    }
}

/// Independent oracle: a plain central difference at a fixed step agrees with
/// backprop to the accuracy such a difference can deliver.
#[test]
fn plain_central_difference_agrees_loosely() {
    for seed in 200..220 {
        let (net, x, t) = random_network(seed);
        let analytic = backprop(&net, &x, &t).unwrap().flatten();
        let numeric = finite_difference_gradient(&net, &x, &t, 1e-4).unwrap();
        let worst = analytic.iter().zip(&numeric).map(|(a, n)| relative_error(*a, *n)).fold(0.0, f64::max);
        assert!(worst < 1e-4, "seed {seed}: {worst:e}");
    }
}

#[test]
fn relative_error_uses_absolute_floor_near_zero() {
    assert_eq!(relative_error(0.0, 0.0), 0.0);
    assert!((relative_error(1e-9, 0.0) - 1e-5).abs() < 1e-18);
    assert!((relative_error(2.0, 1.0) - 0.5).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn audit_holds_for_arbitrary_seeds(seed in any::<u64>()) {
        let (net, x, t) = random_network(seed);
        let audit = audit_gradients(&net, &x, &t, AUDIT_STEP).unwrap();
        prop_assert!(audit.max_relative_error <= 1e-6, "{:?}", audit);
    }

    #[test]
    fn sigmoid_outputs_stay_in_open_unit_interval(seed in any::<u64>(), scale in 0.1f64..30.0) {
        let (net, x, _) = random_network(seed);
        let x: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let mut a = net.input_norm().normalize(&x);
        for layer in net.layers() {
            a = layer.forward(&a);
            if layer.activation() == Activation::Sigmoid {
                prop_assert!(a.iter().all(|v| *v > 0.0 && *v < 1.0));
            }
        }
    }
}
