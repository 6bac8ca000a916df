use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use gaussbound::bounds::{self, BoundFamily};
use gaussbound::explorer::{extremal_mixed_pair, extremal_pure_pair, Sign};
use gaussbound::fidelity::{bures_distance_of, fidelity_mixed, fidelity_pure, ratio_to_y};
use gaussbound::states::{MixedGaussianState, PureGaussianState};

fn y_of(e1: f64, e2: f64) -> f64 {
    (e2 - e1).abs() / (e1 * e2).sqrt()
}

fn invertible_family() -> impl Strategy<Value = BoundFamily> {
    prop_oneof![
        Just(BoundFamily::Coherent),
        Just(BoundFamily::DisplacedEqualShape),
        (0.01..100.0f64, -5.0..5.0f64).prop_map(|(a, c)| BoundFamily::FixedShape { a, c }),
        Just(BoundFamily::PureGeneral),
        (0.0..0.99f64).prop_map(|zeta| BoundFamily::MixedEqualPurity { zeta }),
        Just(BoundFamily::Supermixed),
    ]
}

proptest! {
    #[test]
    fn inverse_pairing(fam in invertible_family(), f in 0.01..0.999f64) {
        let y = bounds::y_max(&fam, f).unwrap();
        let g = bounds::f_max(&fam, y).unwrap();
        prop_assert!((g - f).abs() <= 1e-12, "{fam}: {f} -> {y} -> {g}");
    }

    #[test]
    fn y_max_decreases_in_fidelity(fam in invertible_family(), f in 0.01..0.99f64, df in 1e-4..0.009f64) {
        prop_assert!(bounds::y_max(&fam, f + df).unwrap() < bounds::y_max(&fam, f).unwrap());
    }

    #[test]
    fn fixed_shape_between_coherent_and_displaced(a in 0.01..100.0f64, c in -5.0..5.0f64, f in 0.01..0.999f64) {
        let y = bounds::y_max(&BoundFamily::FixedShape { a, c }, f).unwrap();
        let lo = bounds::y_max(&BoundFamily::Coherent, f).unwrap();
        let hi = bounds::y_max(&BoundFamily::DisplacedEqualShape, f).unwrap();
        prop_assert!(lo <= y * (1.0 + 1e-12) && y <= hi * (1.0 + 1e-12));
    }

    // pure pairs (any shapes, any displacements) stay under the general bound
    #[test]
    fn random_pure_pairs_respect_bound(
        la1 in -4.0..4.0f64, c1 in -5.0..5.0f64, t in -3.0..3.0f64, beta in -5.0..5.0f64,
        x in -10.0..10.0f64, p in -10.0..10.0f64, dx in -10.0..10.0f64, dp in -10.0..10.0f64,
    ) {
        let a1 = (la1 * 0.5).exp();
        let s1 = PureGaussianState::new(a1, a1 * c1, x, p).unwrap();
        let s2 = PureGaussianState::new(a1 * t.exp(), a1 * (c1 + beta), x + dx, p + dp).unwrap();
        let f = fidelity_pure(&s1, &s2).unwrap().get();
        prop_assume!(f < 1.0);
        let y = y_of(s1.energy(), s2.energy());
        prop_assert!(y <= bounds::y_max(&BoundFamily::PureGeneral, f).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn random_equal_purity_pairs_respect_bound(
        la1 in -4.0..4.0f64, c1 in -5.0..5.0f64, t in -3.0..3.0f64, beta in -5.0..5.0f64, zeta in 0.0..0.99f64,
    ) {
        let a1 = (la1 * 0.5).exp();
        let s1 = MixedGaussianState::new(a1, a1 * c1, zeta).unwrap();
        let s2 = MixedGaussianState::new(a1 * t.exp(), a1 * (c1 + beta), zeta).unwrap();
        let f = fidelity_mixed(&s1, &s2).unwrap().get();
        prop_assume!(f < 1.0);
        let y = y_of(s1.energy(), s2.energy());
        let ym = bounds::y_max(&BoundFamily::MixedEqualPurity { zeta }, f).unwrap();
        prop_assert!(y <= ym * (1.0 + 1e-9), "y = {y}, bound {ym}");
    }

    #[test]
    fn random_pure_vs_mixed_pairs_respect_bound(
        la1 in -4.0..4.0f64, c1 in -5.0..5.0f64, t in -3.0..3.0f64, beta in -5.0..5.0f64, zeta in 0.0..0.99f64,
    ) {
        let a1 = (la1 * 0.5).exp();
        let s1 = MixedGaussianState::new(a1, a1 * c1, 0.0).unwrap();
        let s2 = MixedGaussianState::new(a1 * t.exp(), a1 * (c1 + beta), zeta).unwrap();
        let f = fidelity_mixed(&s1, &s2).unwrap().get();
        prop_assume!(f < 1.0);
        let y = y_of(s1.energy(), s2.energy());
        let ym = bounds::y_max_pure_vs_mixed(f, zeta).unwrap();
        prop_assert!(y <= ym * (1.0 + 1e-9), "y = {y}, bound {ym}");
    }

    #[test]
    fn extremal_pairs_hit_target_fidelity(f in 0.05..0.999f64, la in -3.0..3.0f64, zeta in 0.0..0.95f64) {
        let a = la.exp();
        for sign in [Sign::Plus, Sign::Minus] {
            if let Ok((s, t)) = extremal_pure_pair(f, a, sign) {
                prop_assert!((fidelity_pure(&s, &t).unwrap().get() - f).abs() <= 1e-10);
                prop_assert!(y_of(s.energy(), t.energy()) <= bounds::y_max(&BoundFamily::PureGeneral, f).unwrap() * (1.0 + 1e-12));
            }
            if let Ok((s, t)) = extremal_mixed_pair(f, a, zeta, sign) {
                prop_assert!((fidelity_mixed(&s, &t).unwrap().get() - f).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn bures_min_composition(f in 0.01..0.999f64) {
        let b = bounds::bures_min(bounds::y_max(&BoundFamily::PureGeneral, f).unwrap()).unwrap();
        prop_assert!((b - bures_distance_of(f).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn pure_interval_matches_y(f in 0.01..0.999f64) {
        let iv = bounds::energy_interval_pure(f).unwrap();
        let y = bounds::y_max(&BoundFamily::PureGeneral, f).unwrap();
        prop_assert!((ratio_to_y(1.0 + iv.cal_e_max) - y).abs() <= 1e-9 * y.max(1.0));
        prop_assert!((ratio_to_y(1.0 + iv.cal_e_min) - y).abs() <= 1e-9 * y.max(1.0));
    }
}

#[test]
fn pure_vs_mixed_domain_matches_reachable_pairs() {
    // largest ζ for which some width ratio reaches F, scanned directly
    for &f in &[0.5, 0.9, 0.99] {
        let limit = bounds::zeta_limit(f).unwrap();
        assert!(limit >= bounds::zeta_max(f).unwrap());
        let reach = |zeta: f64| {
            (-300..=300)
                .map(|k| {
                    let s1 = MixedGaussianState::new(1.0, 0.0, 0.0).unwrap();
                    let s2 = MixedGaussianState::new((k as f64 / 100.0).exp(), 0.0, zeta).unwrap();
                    fidelity_mixed(&s1, &s2).unwrap().get()
                })
                .fold(0.0, f64::max)
        };
        assert!(reach(limit * 0.999) >= f);
        assert!(reach((limit * 1.01).min(0.999)) < f);
    }
}

#[test]
fn small_eps_forms() {
    for &e in &[1e-2, 1e-3, 1e-5] {
        let f = 1.0 - e;
        let fam = BoundFamily::PureVsMixed { zeta: 0.0 };
        assert_abs_diff_eq!(
            bounds::y_max_small_eps(&fam, f).unwrap(),
            bounds::y_max(&BoundFamily::PureGeneral, f).unwrap(),
            epsilon = 1e-12
        );
    }
}
