use proptest::prelude::*;
use sdae_core::metrics::{eta, evaluate_set, mean, residual_ratio};
use sdae_core::nn::SampleSet;

fn vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..40).prop_flat_map(|n| (vector(n), vector(n), vector(n)))
}

#[test]
fn fixed_points_and_quarter_residual() {
    let x = [1.0, -2.0, 0.5, 3.0];
    let xt = [1.5, -2.5, 1.0, 2.0];
    assert_eq!(eta(&x, &xt, &x).unwrap(), 100.0);
    assert_eq!(eta(&x, &xt, &xt).unwrap(), 0.0);
    // Residual with half the noise amplitude keeps a quarter of the energy.
    let z: Vec<f64> = x.iter().zip(&xt).map(|(a, b)| a + 0.5 * (b - a)).collect();
    assert!((eta(&x, &xt, &z).unwrap() - 75.0).abs() <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eta_is_affine_invariant((x, xt, z) in triple(), scale in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0], shift in -100.0f64..100.0) {
        let noise: f64 = x.iter().zip(&xt).map(|(a, b)| (a - b) * (a - b)).sum();
        prop_assume!(noise > 1e-6);
        let f = |v: &[f64]| v.iter().map(|u| scale * u + shift).collect::<Vec<_>>();
        let e0 = eta(&x, &xt, &z).unwrap();
        let e1 = eta(&f(&x), &f(&xt), &f(&z)).unwrap();
        prop_assert!((e0 - e1).abs() <= 1e-9 * e0.abs().max(1.0), "{} vs {}", e0, e1);
    }

    #[test]
    fn eta_endpoints_are_exact((x, xt, _z) in triple()) {
        prop_assume!(x != xt);
        prop_assert_eq!(eta(&x, &xt, &x).unwrap(), 100.0);
        prop_assert_eq!(eta(&x, &xt, &xt).unwrap(), 0.0);
    }

    #[test]
    fn set_mean_is_mean_of_sample_etas(samples in prop::collection::vec((vector(5), vector(5), vector(5)), 1..20)) {
        let mut set = SampleSet::new(5);
        let mut out = Vec::new();
        let mut want = Vec::new();
        for (x, xt, z) in &samples {
            set.push(x, xt, true).unwrap();
            out.extend_from_slice(z);
            if let Ok(r) = residual_ratio(x, xt, z) {
                want.push(100.0 * (1.0 - r));
            }
        }
        let report = evaluate_set(&set, &out).unwrap();
        prop_assert_eq!(&report.per_sample_eta, &want);
        prop_assert_eq!(report.mean_eta, mean(&want));
    }
}
