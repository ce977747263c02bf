use proptest::prelude::*;
use sdae_core::datagen::{rhg_velocity, HIGH_POROSITY, LOW_POROSITY};

/// Matrix and fluid constants with a stiffer, denser matrix.
fn constants() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (1.0f64..3.0, 1.05f64..4.0, 0.8f64..1.3, 1.0f64..2.5)
        .prop_map(|(v_f, r, rho_f, rr)| (v_f * r, v_f, rho_f * rr, rho_f))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn endpoints_and_continuity((v_ma, v_f, rho_ma, rho_f) in constants()) {
        let v = |phi: f64| rhg_velocity(phi, v_ma, v_f, rho_ma, rho_f);
        prop_assert_eq!(v(0.0), v_ma);
        prop_assert_eq!(v(1.0), v_f);
        for edge in [LOW_POROSITY, HIGH_POROSITY] {
            let below = v(edge - 1e-12);
            let above = v(edge + 1e-12);
            prop_assert!(close(below, v(edge)) && close(above, v(edge)), "jump at {}: {} {} {}", edge, below, v(edge), above);
        }
    }

    #[test]
    fn velocity_decreases_in_matrix_regime((v_ma, v_f, rho_ma, rho_f) in constants()) {
        let mut prev = f64::INFINITY;
        for i in 0..=370 {
            let phi = i as f64 * 0.001;
            let v = rhg_velocity(phi, v_ma, v_f, rho_ma, rho_f);
            prop_assert!(v < prev, "not decreasing at phi = {}", phi);
            prev = v;
        }
    }
}

#[test]
fn regime_edges() {
    assert_eq!(LOW_POROSITY, 0.37);
    assert_eq!(HIGH_POROSITY, 0.47);
}
