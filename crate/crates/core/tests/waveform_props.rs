use std::f64::consts::{FRAC_PI_2, PI, TAU};

use biharmonic::grid::{refine_argmax, SweepGrid};
use biharmonic::waveform::*;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::CosCos), Just(Family::SinSin)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn closed_form_matches_scan(family in family(), zeta in 0.0f64..=1.0, alpha in 0.05f64..6.0) {
        let closed = closed_form_extrema(family, zeta, alpha).unwrap();
        let spec = BiharmonicSpec::new(family, zeta, alpha, family.base_phase()).unwrap();
        let scanned = numerical_extrema(&spec);
        prop_assert!((closed.maximum - scanned.maximum).abs() < 1e-9);
        prop_assert!((closed.minimum - scanned.minimum).abs() < 1e-9);
    }

    #[test]
    fn load_term_sign_relations(zeta in 0.0f64..=1.0, alpha in 0.05f64..6.0) {
        let cc0 = load_term(Family::CosCos, alpha, 0.0, zeta).unwrap();
        let ccpi = load_term(Family::CosCos, alpha, PI, zeta).unwrap();
        let ss_plus = load_term(Family::SinSin, alpha, FRAC_PI_2, zeta).unwrap();
        let ss_minus = load_term(Family::SinSin, alpha, -FRAC_PI_2, zeta).unwrap();
        prop_assert_eq!(cc0, -ccpi);
        prop_assert_eq!(cc0, -ss_plus);
        prop_assert_eq!(cc0, ss_minus);
        prop_assert!(cc0.abs() < 0.5);
    }

    #[test]
    fn flipped_phase_extrema_match_scan(family in family(), zeta in 0.0f64..=1.0, alpha in 0.05f64..6.0) {
        let theta = match family { Family::CosCos => PI, Family::SinSin => -FRAC_PI_2 };
        let closed = canonical_extrema(family, theta, zeta, alpha).unwrap();
        let scanned = numerical_extrema(&BiharmonicSpec::new(family, zeta, alpha, theta).unwrap());
        prop_assert!((closed.maximum - scanned.maximum).abs() < 1e-9);
        prop_assert!((closed.minimum - scanned.minimum).abs() < 1e-9);
    }

    #[test]
    fn normalized_image_at_any_phase(
        family in family(),
        zeta in 0.01f64..0.99,
        alpha in 0.1f64..4.0,
        theta in -3.1f64..3.1,
        amplitude in 0.1f64..5.0,
    ) {
        let spec = BiharmonicSpec::new(family, zeta, alpha, theta).unwrap().with_amplitude(amplitude).unwrap();
        let n = normalize(&spec).unwrap();
        let image = numerical_extrema(&spec);
        let spread = image.maximum - image.minimum;
        prop_assert!((image.maximum / spread - n.load_term() - 0.5).abs() < 1e-10);
        prop_assert!((image.minimum / spread - n.load_term() + 0.5).abs() < 1e-10);
        prop_assert!(n.load_term().abs() < 0.5);
    }

    #[test]
    fn impulse_equals_pi_load(family in family(), zeta in 0.0f64..0.999, alpha in 0.1f64..4.0, omega in 0.2f64..5.0) {
        let spec = BiharmonicSpec::new(family, zeta, alpha, family.base_phase()).unwrap().with_omega(omega).unwrap();
        let n = normalize(&spec).unwrap();
        prop_assert!((impulse(&n) - impulse_closed_form(&n)).abs() < 1e-8);
    }
}

#[test]
fn branch_point_load_term_is_minus_one_eighth() {
    for alpha in [0.1_f64, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0] {
        let zeta = 4.0 * alpha / (1.0 + 4.0 * alpha);
        let a = alpha * (1.0 - zeta);
        // Interior expression evaluated exactly at the branch point.
        let interior = zeta * (8.0 * alpha * (zeta - 1.0) + zeta) / (2.0 * (zeta + 4.0 * a).powi(2));
        let endpoint = alpha * (zeta - 1.0) / (2.0 * zeta);
        assert!((interior + 0.125).abs() < 1e-12, "alpha {alpha}");
        assert!((endpoint + 0.125).abs() < 1e-12, "alpha {alpha}");
        assert!((sinsin_load_term_piecewise(alpha, zeta).unwrap() + 0.125).abs() < 1e-12);
    }
}

#[test]
fn optimal_waveform_symmetries() {
    let make = |family, theta| {
        BiharmonicSpec::new(family, 2.0 / 3.0, 1.0, theta).unwrap().with_amplitude(1.5).unwrap()
    };
    let cc_plus = make(Family::CosCos, 0.0);
    let cc_minus = make(Family::CosCos, PI);
    let sc_plus = make(Family::SinSin, FRAC_PI_2);
    let sc_minus = make(Family::SinSin, -FRAC_PI_2);
    let period = TAU;
    for i in 0..400 {
        let t = i as f64 * period / 400.0;
        assert!((cc_plus.evaluate(t) - (t.cos() + 0.5 * (2.0 * t).cos())).abs() < 1e-12);
        assert!((sc_plus.evaluate(t) - (t.sin() + 0.5 * (2.0 * t).cos())).abs() < 1e-12);
        assert!((cc_plus.evaluate(t + period / 2.0) + cc_minus.evaluate(t)).abs() < 1e-12);
        assert!((sc_plus.evaluate(t + period / 2.0) + sc_minus.evaluate(t)).abs() < 1e-12);
        // Quarter-period shift backwards maps cos-cos onto sin-cos with the opposite sign.
        assert!((cc_plus.evaluate(t - period / 4.0) - sc_minus.evaluate(t)).abs() < 1e-12);
        assert!((cc_minus.evaluate(t - period / 4.0) - sc_plus.evaluate(t)).abs() < 1e-12);
    }
}

#[test]
fn efficiency_ridge_follows_optimal_zeta() {
    let zetas = SweepGrid::linspace(0.0, 1.0, 2001).unwrap();
    for alpha in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let eta: Vec<Option<f64>> = zetas
            .values()
            .iter()
            .map(|&z| Some(waveform_diode_efficiency(Family::CosCos, alpha, 0.0, z).unwrap().abs()))
            .collect();
        let best = refine_argmax(zetas.values(), &eta).unwrap();
        let expected = optimal_zeta(alpha).unwrap();
        assert!((best.x - expected).abs() <= 5e-4, "alpha {alpha}: {} vs {expected}", best.x);
        assert!((best.value - 1.0 / 3.0).abs() < 1e-6);
    }
}

#[test]
fn impulse_peaks_at_two_thirds() {
    let zetas = SweepGrid::linspace(0.0, 0.999, 1000).unwrap();
    let values: Vec<Option<f64>> = zetas
        .values()
        .iter()
        .map(|&z| {
            let n = normalize(&BiharmonicSpec::new(Family::CosCos, z, 1.0, 0.0).unwrap()).unwrap();
            Some(impulse(&n))
        })
        .collect();
    let best = refine_argmax(zetas.values(), &values).unwrap();
    assert!((best.x - 2.0 / 3.0).abs() < 2e-3, "{}", best.x);
}
