use proptest::prelude::*;
use pucci_core::asym::{
    fit_model, q_mean, q_objective, richardson, theoretical_regime, varadhan_sweep, QSample, RateModel, Source,
};
use pucci_core::fd::ProblemKind;
use pucci_core::geometry::{Domain, Modulus, Shape};
use pucci_core::{PucciParams, Sign};

fn sample() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..40).prop_flat_map(|n| (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(0.1f64..3.0, n)))
}

proptest! {
    #[test]
    fn q_mean_lies_within_the_range((v, w) in sample(), q in 1.1f64..8.0) {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mu = q_mean(&QSample::new(v, w).unwrap(), q).unwrap();
        prop_assert!(mu >= lo - 1e-12 && mu <= hi + 1e-12);
    }

    #[test]
    fn q_mean_minimizes_the_objective((v, w) in sample(), q in 1.1f64..8.0) {
        let s = QSample::new(v, w).unwrap();
        let mu = q_mean(&s, q).unwrap();
        let f = q_objective(&s, q, mu);
        for d in [1e-3, 1e-2, 0.1] {
            prop_assert!(f <= q_objective(&s, q, mu + d) * (1.0 + 1e-12));
            prop_assert!(f <= q_objective(&s, q, mu - d) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn q_mean_is_monotone_and_translation_equivariant((v, w) in sample(), q in 1.1f64..8.0, c in -3.0f64..3.0, bump in 0.0f64..1.0) {
        let base = q_mean(&QSample::new(v.clone(), w.clone()).unwrap(), q).unwrap();
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let moved = q_mean(&QSample::new(shifted, w.clone()).unwrap(), q).unwrap();
        prop_assert!((moved - base - c).abs() < 1e-8);
        let mut raised = v.clone();
        raised[0] += bump;
        let up = q_mean(&QSample::new(raised, w).unwrap(), q).unwrap();
        prop_assert!(up >= base - 1e-10);
    }
}

#[test]
fn two_means_are_the_weighted_average() {
    let s = QSample::new(vec![1.0, 2.0, 6.0], vec![1.0, 1.0, 2.0]).unwrap();
    assert!((q_mean(&s, 2.0).unwrap() - 15.0 / 4.0).abs() < 1e-12);
    assert!((q_mean(&s, f64::INFINITY).unwrap() - 3.5).abs() < 1e-12);
    assert!(q_mean(&s, 1.0).is_err());
}

#[test]
fn regimes_follow_the_ellipticity_ratio() {
    let p = |l: f64, big: f64, n: usize| PucciParams::new(l, big, n).unwrap();
    let e = ProblemKind::Elliptic;
    assert_eq!(theoretical_regime(e, Sign::Plus, &p(1.0, 2.5, 3)), RateModel::EpsLogInvEps);
    assert_eq!(theoretical_regime(e, Sign::Plus, &p(1.0, 2.0, 3)), RateModel::EpsLogLogPsi);
    assert_eq!(theoretical_regime(e, Sign::Plus, &p(1.0, 1.5, 3)), RateModel::EpsLogInvPsi);
    assert_eq!(theoretical_regime(e, Sign::Minus, &p(1.0, 1.0, 2)), RateModel::EpsLogLogPsi);
    assert_eq!(theoretical_regime(e, Sign::Minus, &p(1.0, 2.0, 2)), RateModel::EpsLogInvPsi);
    assert_eq!(theoretical_regime(ProblemKind::Parabolic, Sign::Plus, &p(1.0, 2.0, 2)), RateModel::TLogInvPsi);
}

#[test]
fn richardson_recovers_a_geometric_limit() {
    let values: Vec<f64> = (0..5).map(|k| 0.7 + 0.3 * 0.5f64.powi(k)).collect();
    let ex = richardson(&values, 2.0, 1.0).unwrap();
    assert!((ex.limit - 0.7).abs() < 1e-10, "{ex:?}");
    assert!((ex.order - 1.0).abs() < 1e-6);
}

#[test]
fn radial_ball_sweep_fits_the_predicted_rate() {
    let p = PucciParams::new(1.0, 2.5, 3).unwrap();
    let dom = Domain::new(Shape::ball(vec![0.0; 3], 1.0).unwrap())
        .with_modulus(Modulus::Lipschitz { l: 1.0 })
        .unwrap();
    let eps: Vec<f64> = (3..=12).map(|k| 2f64.powi(-k)).collect();
    // The log term comes from the radial prefactor and is only visible at the centre.
    let probes = vec![vec![0.0; 3]];
    let study = varadhan_sweep(ProblemKind::Elliptic, &dom, Sign::Plus, &p, &probes, &eps, &Source::Radial).unwrap();
    assert_eq!(study.theoretical, RateModel::EpsLogInvEps);
    for (i, obs) in study.observed.iter().enumerate() {
        assert!(obs.windows(2).all(|w| w[1].abs() < w[0].abs()), "{obs:?}");
        let fit = fit_model(RateModel::EpsLogInvEps, &eps, obs, None).unwrap();
        assert!(fit.r_squared > 0.99, "probe {i}: {fit:?} {:?}", study.fits[i]);
        assert!(study.fits[i].predicted.is_some());
    }
}

#[test]
fn off_centre_discrepancy_is_linear_in_epsilon() {
    let p = PucciParams::new(1.0, 2.5, 3).unwrap();
    let dom = Domain::new(Shape::ball(vec![0.0; 3], 1.0).unwrap());
    let eps: Vec<f64> = (3..=12).map(|k| 2f64.powi(-k)).collect();
    let study =
        varadhan_sweep(ProblemKind::Elliptic, &dom, Sign::Plus, &p, &[vec![0.0, 0.0, 0.5]], &eps, &Source::Radial).unwrap();
    let power = study.fits[0].power.as_ref().unwrap();
    assert!((power.exponent - 1.0).abs() < 0.02, "{power:?}");
}
