use gga_core::{AtomicDistribution, Family, RngStream};
use gga_verify::khat::gpd_fit;
use gga_verify::{hill_alpha, khat_verdict, loglog_slope, pareto_khat, power_law_check, KhatVerdict, PowerVerdict, VerifyError};

fn draws(family: Family, params: &[f64], n: usize, seed: u64) -> Vec<f64> {
    let d = AtomicDistribution::new(family, params.to_vec()).unwrap();
    d.sample_values(&mut RngStream::new(seed, 0), n).unwrap()
}

#[test]
fn hill_recovers_cauchy_exponent() {
    let x = draws(Family::StudentT, &[1.0], 1_000_000, 11);
    let e = hill_alpha(&x, 0.01).unwrap();
    assert!((1.9..=2.1).contains(&e.alpha_hat), "{e:?}");
    assert_eq!(e.n_tail, 10_000);
    assert!(e.k_hat.is_finite());
}

#[test]
fn hill_recovers_pareto_exponent() {
    let x = draws(Family::Pareto, &[1.0, 2.0], 1_000_000, 12);
    let e = hill_alpha(&x, 0.01).unwrap();
    assert!((e.alpha_hat - 3.0).abs() < 0.1, "{e:?}");
    assert!((e.k_hat - 0.5).abs() < 0.1, "{e:?}");
}

#[test]
fn exponential_is_not_a_power_law() {
    let x = draws(Family::Exponential, &[1.0], 1_000_000, 13);
    let c = power_law_check(&x, 0.01).unwrap();
    assert_ne!(c.verdict, PowerVerdict::PowerLaw, "{c:?}");
    let x = draws(Family::StudentT, &[2.0], 1_000_000, 14);
    let c = power_law_check(&x, 0.01).unwrap();
    assert_eq!(c.verdict, PowerVerdict::PowerLaw, "{c:?}");
}

#[test]
fn hill_stderr_shrinks_like_inverse_root_k() {
    let se: Vec<f64> = [10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| hill_alpha(&draws(Family::Pareto, &[1.0, 2.0], n, 15), 0.01).unwrap().stderr)
        .collect();
    for w in se.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.2, "{se:?}");
    }
}

#[test]
fn hill_rejects_bad_input() {
    let x = draws(Family::Pareto, &[1.0, 2.0], 1000, 16);
    assert!(matches!(hill_alpha(&x, 0.01), Err(VerifyError::TooFewExceedances { .. })));
    assert!(matches!(hill_alpha(&x, 0.0), Err(VerifyError::BadTailFraction(_))));
    assert!(matches!(hill_alpha(&x, 0.6), Err(VerifyError::BadTailFraction(_))));
    let mut y = x.clone();
    y[3] = f64::NAN;
    assert_eq!(hill_alpha(&y, 0.1), Err(VerifyError::NonFinite));
}

#[test]
fn gpd_fit_matches_reference_implementation() {
    // Reference values from an independent NumPy implementation of the
    // same empirical Bayes fit on exact quantiles.
    for (xi, n, k_ref, s_ref) in [
        (0.5, 1000, 0.5003970209331292, 0.9990800445840319),
        (0.1, 200, 0.12794441262874978, 0.9889181911319046),
        (-0.2, 500, -0.18073267031426257, 0.9938795794558758),
    ] {
        let x: Vec<f64> = (1..=n)
            .map(|i| {
                let u = (i as f64 - 0.5) / n as f64;
                ((1.0 - u).powf(-xi) - 1.0) / xi
            })
            .collect();
        let (k, s) = gpd_fit(&x);
        assert!((k - k_ref).abs() < 1e-10, "xi {xi}: {k} vs {k_ref}");
        assert!((s - s_ref).abs() < 1e-10, "xi {xi}: {s} vs {s_ref}");
    }
}

#[test]
fn khat_of_constant_ratios_is_sentinel() {
    let k = pareto_khat(&vec![-0.3; 1000]).unwrap();
    assert_eq!(k, f64::NEG_INFINITY);
    assert_eq!(khat_verdict(k), KhatVerdict::Pass);
    assert_eq!(pareto_khat(&[0.0, f64::INFINITY]), Err(VerifyError::NonFinite));
}

#[test]
fn khat_recovers_generalized_pareto_shape() {
    let mut rng = RngStream::new(17, 0);
    for xi in [0.3, 0.8] {
        let lw: Vec<f64> = (0..100_000).map(|_| (((rng.uniform_pos()).powf(-xi) - 1.0) / xi).ln()).collect();
        let k = pareto_khat(&lw).unwrap();
        assert!((k - xi).abs() < 0.1, "xi {xi}: {k}");
    }
    assert_eq!(khat_verdict(0.1), KhatVerdict::Pass);
    assert_eq!(khat_verdict(0.5), KhatVerdict::Marginal);
    assert_eq!(khat_verdict(0.9), KhatVerdict::Fail);
}

#[test]
fn loglog_slope_of_pareto() {
    let x = draws(Family::Pareto, &[1.0, 2.0], 1_000_000, 18);
    let f = loglog_slope(&x, 0.9, 0.999).unwrap();
    assert!((f.slope + 3.0).abs() < 0.15, "{f:?}");
    assert!(f.looks_power_law(), "{f:?}");
    assert!(f.bins >= 30);
}

#[test]
fn loglog_slope_of_student_t3() {
    let x = draws(Family::StudentT, &[3.0], 1_000_000, 19);
    let f = loglog_slope(&x, 0.99, 0.9999).unwrap();
    assert!((f.slope + 4.0).abs() < 0.3, "{f:?}");
    assert!(f.looks_power_law(), "{f:?}");
}

#[test]
fn loglog_flags_normal_as_non_power() {
    let x = draws(Family::Normal, &[0.0, 1.0], 1_000_000, 20);
    let f = loglog_slope(&x, 0.9, 0.999).unwrap();
    assert!(!f.looks_power_law(), "{f:?}");
    assert!(f.upper_slope < f.lower_slope - 2.0, "{f:?}");
}

#[test]
fn loglog_needs_tail_mass() {
    let x = draws(Family::Pareto, &[1.0, 2.0], 2000, 21);
    assert!(matches!(loglog_slope(&x, 0.9, 0.999), Err(VerifyError::InsufficientTailMass { .. })));
}
