use eprkit::spin::{
    bohm_criterion, bohm_criterion_in_frame, su2_rotation, werner_threshold_sweep, Axis, SpinFrame, ThresholdSource,
    TwoQubitState, WernerCriterion,
};
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bloch<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() <= 1.0 {
            return v;
        }
    }
}

fn random_axis<R: Rng>(rng: &mut R) -> Axis {
    loop {
        let v = random_bloch(rng);
        if v.norm() > 0.1 {
            return Axis::new(v.x, v.y, v.z).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn separable_states_never_satisfy(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parts: Vec<(f64, TwoQubitState)> = (0..50)
            .map(|_| {
                let a = random_bloch(&mut rng);
                let b = random_bloch(&mut rng);
                (rng.random_range(0.01..1.0), TwoQubitState::product_from_bloch(a, b).unwrap())
            })
            .collect();
        let mix = TwoQubitState::mixture(&parts).unwrap();
        let rep = bohm_criterion(&mix, Axis::X, Axis::Y, Axis::Z);
        prop_assert!(!rep.satisfied, "{rep:?}");
        // nor for any other choice of conditioning axes
        let other = bohm_criterion(&mix, random_axis(&mut rng), random_axis(&mut rng), random_axis(&mut rng));
        prop_assert!(!other.satisfied, "{other:?}");
    }

    #[test]
    fn singlet_report_is_rotation_covariant(seed in any::<u64>(), angle in -6.3f64..6.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let about = random_axis(&mut rng);
        let singlet = TwoQubitState::singlet();
        let base = bohm_criterion_in_frame(&singlet, &SpinFrame::default());
        let rotated_state = singlet.rotated(&su2_rotation(about, angle));
        let rotated = bohm_criterion_in_frame(&rotated_state, &SpinFrame::default().rotated(about, angle));
        prop_assert!((base.dinf_jx - rotated.dinf_jx).abs() < 1e-12);
        prop_assert!((base.dinf_jy - rotated.dinf_jy).abs() < 1e-12);
        prop_assert!((base.rhs - rotated.rhs).abs() < 1e-12);
        prop_assert_eq!(base.satisfied, rotated.satisfied);
    }
}

#[test]
fn rotated_werner_state_needs_rotated_axes() {
    // covariance is a property of state and frame together, not of either alone
    let w = TwoQubitState::werner(0.8).unwrap();
    let about = Axis::new(1.0, 1.0, 0.0).unwrap();
    let u = su2_rotation(about, 1.1);
    let frame = SpinFrame::default().rotated(about, 1.1);
    let a = bohm_criterion_in_frame(&w, &SpinFrame::default());
    let b = bohm_criterion_in_frame(&w.rotated(&u), &frame);
    assert!((a.margin() - b.margin()).abs() < 1e-12);
}

#[test]
fn werner_margin_increases_with_weight() {
    let mut last = f64::NEG_INFINITY;
    for i in 0..=500 {
        let p = 0.5 + 0.5 * i as f64 / 500.0;
        let m = bohm_criterion(&TwoQubitState::werner(p).unwrap(), Axis::X, Axis::Y, Axis::Z).margin();
        assert!(m > last, "margin not increasing at p = {p}");
        last = m;
    }
}

#[test]
fn werner_values_match_closed_form() {
    for p in [0.0, 0.3, 0.618, 0.9, 1.0] {
        let rep = bohm_criterion(&TwoQubitState::werner(p).unwrap(), Axis::X, Axis::Y, Axis::Z);
        let dev = (1.0f64 - p * p).sqrt() / 2.0;
        assert!((rep.dinf_jx - dev).abs() < 1e-12);
        assert!((rep.dinf_jy - dev).abs() < 1e-12);
        assert!((rep.rhs - p / 4.0).abs() < 1e-12);
    }
}

#[test]
fn werner_thresholds() {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let bohm = werner_threshold_sweep(WernerCriterion::Bohm, 1e-4).unwrap();
    assert!((bohm.threshold - golden).abs() < 1e-4);
    assert_eq!(bohm.source, ThresholdSource::Derived);
    let fine = werner_threshold_sweep(WernerCriterion::Bohm, 1e-9).unwrap();
    assert!((fine.threshold - golden).abs() < 1e-9);
    let steer = werner_threshold_sweep(WernerCriterion::SteeringQuote, 1e-4).unwrap();
    assert_eq!((steer.threshold, steer.source), (0.5, ThresholdSource::Literature));
    let bell = werner_threshold_sweep(WernerCriterion::BellQuote, 1e-4).unwrap();
    assert_eq!((bell.threshold, bell.source), (0.66, ThresholdSource::Literature));
}
