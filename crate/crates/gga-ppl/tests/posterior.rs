use gga_core::{compare, Caveat, Heaviness, TailClass64};
use gga_ppl::posterior::{correction_product, invert_chain, posterior_class, PosteriorError, PosteriorQuery};
use gga_ppl::{compile, ProgramGraph};
use proptest::prelude::*;

fn graph(body: &str) -> ProgramGraph {
    compile(&format!("model m {{\n{body}\n}}")).unwrap_or_else(|e| panic!("{e}"))
}

fn id(g: &ProgramGraph, name: &str) -> usize {
    g.by_name(name).unwrap_or_else(|| panic!("no node {name}"))
}

fn posterior(g: &ProgramGraph, param: &str) -> gga_ppl::posterior::PosteriorResult {
    posterior_class(g, &PosteriorQuery::new(g, id(g, param))).unwrap()
}

#[test]
fn location_inversion() {
    let g = graph("t ~ Cauchy(0,1)\nx = t + Normal(0,1)\nobserve x");
    let c = invert_chain(&g, id(&g, "t"), id(&g, "x")).unwrap();
    assert_eq!(c.class, TailClass64::gengamma(0.0, 0.5, 2.0));
    assert!(c.caveats.is_empty());
}

#[test]
fn scale_inversion_is_reciprocal_of_latent() {
    let g = graph("t ~ InverseGamma(2,1)\nz ~ Exponential(1)\nx = t * z\nobserve x");
    let c = invert_chain(&g, id(&g, "t"), id(&g, "x")).unwrap();
    let algebra = gga_core::Algebra64::default();
    let z = TailClass64::gengamma(0.0, 1.0, 1.0);
    assert_eq!(c.class, algebra.reciprocal(z));
    // 1/E has density x^-2 exp(-1/x)
    assert_eq!(c.class, TailClass64::gengamma(-2.0, 1.0, -1.0));
}

#[test]
fn inverse_scale_keeps_latent_class() {
    let g = graph("t ~ InverseGamma(2,1)\nz ~ Normal(0,1)\nx = z / t\nobserve x");
    let c = invert_chain(&g, id(&g, "t"), id(&g, "x")).unwrap();
    assert_eq!(c.class, TailClass64::gengamma(0.0, 0.5, 2.0));
    assert!(c.caveats.is_empty());
    let r = correction_product(&g, id(&g, "t"), &[id(&g, "x")]).unwrap();
    assert_eq!(r, TailClass64::gengamma(1.0, 1.0, 0.0));
}

#[test]
fn correction_examples() {
    let g = graph("t ~ Normal(0,1)\nx = 2 * (t + 1) + Normal(0,1) - 3\nobserve x");
    assert_eq!(correction_product(&g, id(&g, "t"), &[id(&g, "x")]).unwrap(), TailClass64::SuperLight);

    let g = graph("t ~ Gamma(2,1)\nx = t * Normal(0,1)\nobserve x");
    assert_eq!(correction_product(&g, id(&g, "t"), &[id(&g, "x")]).unwrap(), TailClass64::gengamma(1.0, 1.0, 0.0));

    let g = graph("t ~ Gamma(2,1)\nx = t ^ 2 + Normal(0,1)\nobserve x");
    assert_eq!(correction_product(&g, id(&g, "t"), &[id(&g, "x")]).unwrap(), TailClass64::gengamma(-1.0, 1.0, 0.0));

    let g = graph("t ~ Gamma(2,1)\nx = recip(t) + Normal(0,1)\nobserve x");
    assert_eq!(correction_product(&g, id(&g, "t"), &[id(&g, "x")]).unwrap(), TailClass64::gengamma(2.0, 1.0, 0.0));
}

#[test]
fn normal_observations_with_cauchy_prior() {
    for n in 1..=6 {
        let mut body = String::from("t ~ Cauchy(0,1)\n");
        for i in 0..n {
            body.push_str(&format!("x{i} = t + Normal(0,1)\nobserve x{i}\n"));
        }
        let g = graph(&body);
        let r = posterior(&g, "t");
        assert_eq!(r.class.class, TailClass64::rv(2.0));
        assert!(r.has_caveat(Caveat::Conservative));
        assert_eq!(r.inverted.len(), n);
        assert!(r.corrections.is_empty());
    }
}

#[test]
fn blr_residual_variance_is_inverse_gamma() {
    let (a0, b0) = (3.0, 2.0);
    // beta is shared by every observation, so it is held fixed
    for n in [2usize, 4, 10] {
        let mut body = format!("s2 ~ InverseGamma({a0}, {b0})\nbeta ~ Normal(0, 1)\ns = s2 ^ 0.5\n");
        for i in 0..n {
            body.push_str(&format!("y{i} = {}.5 * beta + s * Normal(0, 1)\nobserve y{i}\n", i % 3));
        }
        let g = graph(&body);
        let r = posterior(&g, "s2");
        // shape a0 + n/2 as in the conjugate update; the scale is the conjugate
        // one evaluated at unit observations
        let expect = TailClass64::gengamma(-(a0 + n as f64 / 2.0) - 1.0, b0 + n as f64 / 2.0, -1.0);
        assert_eq!(r.class.class, expect, "n = {n}");
        assert!(r.class.caveats.is_empty());
        assert_eq!(r.visits, 3 * n);
    }
}

#[test]
fn conjugate_scale_model() {
    let (a, b) = (2.5, 1.5);
    for n in 1..=8usize {
        let mut body = format!("t ~ InverseGamma({a}, {b})\n");
        for i in 0..n {
            body.push_str(&format!("x{i} = t * Exponential(1)\nobserve x{i}\n"));
        }
        let g = graph(&body);
        let r = posterior(&g, "t");
        assert_eq!(r.class.class, TailClass64::gengamma(-(a + n as f64) - 1.0, b + n as f64, -1.0), "n = {n}");
    }
}

#[test]
fn superlight_likelihood_leaves_prior() {
    let g = graph("t ~ StudentT(4)\nx = 2 * t + 1\nobserve x");
    let r = posterior(&g, "t");
    assert_eq!(r.class.class, TailClass64::rv(5.0));
    let g = graph("t ~ StudentT(4)\nu ~ Normal(0,1)\nobserve u\nquery t");
    let r = posterior(&g, "t");
    assert_eq!(r.class.class, TailClass64::rv(5.0));
    assert!(r.inverted.is_empty());
}

#[test]
fn refused_queries() {
    let g = graph("t ~ Normal(0,1)\nx = abs(t) + Normal(0,1)\nobserve x");
    assert!(matches!(posterior_class(&g, &PosteriorQuery::new(&g, id(&g, "t"))), Err(PosteriorError::NonInvertiblePath { .. })));
    let g = graph("t ~ Normal(0,1)\nx = lipschitz(1){t, Normal(0,1)}\nobserve x");
    assert!(matches!(posterior_class(&g, &PosteriorQuery::new(&g, id(&g, "t"))), Err(PosteriorError::NonInvertiblePath { .. })));
    let g = graph("t ~ Normal(0,1)\nx = t + t * Normal(0,1)\nobserve x");
    assert!(matches!(posterior_class(&g, &PosteriorQuery::new(&g, id(&g, "t"))), Err(PosteriorError::MultiplePaths { .. })));
    let g = graph("t ~ Normal(0,1)\nu = t + 1\nx = u + Normal(0,1)\nobserve x");
    assert!(matches!(posterior_class(&g, &PosteriorQuery::new(&g, id(&g, "u"))), Err(PosteriorError::NotADraw(_))));
    let g = graph("t ~ Normal(0,1)\nobserve t");
    assert!(matches!(posterior_class(&g, &PosteriorQuery::new(&g, id(&g, "t"))), Err(PosteriorError::ParamObserved(_))));
}

#[test]
fn exp_and_log_chains() {
    let g = graph("t ~ Gamma(2, 1)\nx = exp(t) * Exponential(1)\nobserve x");
    let r = posterior(&g, "t");
    // log of the reciprocal exponential: (0, 1, 1)
    assert_eq!(r.inverted[0].1, TailClass64::gengamma(0.0, 1.0, 1.0));
    assert!(r.corrections.is_empty());
}

#[test]
fn visits_bounded_by_path_length() {
    let g = graph("t ~ Gamma(2,1)\nx = 3 * exp(-(t ^ 2 + Normal(0,1)) / 2) * Exponential(1) + 1\nobserve x");
    let r = posterior(&g, "t");
    assert!(r.visits <= 8, "{}", r.visits);
}

#[test]
fn polynomial_corrections_are_exact() {
    let g = graph("t ~ Normal(0,1)\nx = t ^ 2 + Normal(0,1)\nobserve x");
    let r = posterior(&g, "t");
    // (x - Z)^(1/2) has class (1, 1/2, 4); the Jacobian ratio contributes t^-1
    assert_eq!(r.inverted[0].1, TailClass64::gengamma(1.0, 0.5, 4.0));
    assert_eq!(r.terms[0].1, TailClass64::gengamma(0.0, 0.5, 4.0));
    assert_eq!(r.class.class, TailClass64::gengamma(0.0, 0.5, 2.0));
    assert!(r.has_caveat(Caveat::Conservative));
}

#[test]
fn smaller_rho_observation_can_make_posterior_heavier() {
    // The unequal-rho product keeps the smaller rho, so a power-law
    // likelihood term replaces a Gaussian prior tail. This is an upper
    // bound, flagged conservative, and heavier than the prior.
    let g = graph("t ~ Normal(0,1)\nx = t + Cauchy(0,1)\nobserve x");
    let r = posterior(&g, "t");
    assert_eq!(r.class.class, TailClass64::rv(2.0));
    assert_eq!(compare(&r.class.class, &r.prior, 1e-9), Heaviness::Heavier);
    assert!(r.has_caveat(Caveat::Conservative));
}

const LATENTS: &[&str] = &["Normal(0, 1)", "Exponential(1)", "StudentT(3)", "Gamma(3, 2)", "Cauchy(0, 1)", "Laplace(0, 1)"];
const PRIORS: &[&str] = &["Cauchy(0, 1)", "Normal(0, 1)", "InverseGamma(2, 1)", "Gamma(2, 1)", "StudentT(5)"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn more_data_never_heavier(prior in 0usize..5, ops in prop::collection::vec((0u8..3, 0usize..6), 1..6)) {
        let mut body = format!("t ~ {}\n", PRIORS[prior]);
        for (i, (op, z)) in ops.iter().enumerate() {
            let e = match op {
                0 => format!("t + {}", LATENTS[*z]),
                1 => format!("t * {}", LATENTS[*z]),
                _ => format!("{} / t", LATENTS[*z]),
            };
            body.push_str(&format!("x{i} = {e}\n"));
        }
        let g = graph(&body);
        let t = id(&g, "t");
        let all: Vec<usize> = (0..ops.len()).map(|i| id(&g, &format!("x{i}"))).collect();
        let full = posterior_class(&g, &PosteriorQuery { param: t, observed: all.clone() }).unwrap();
        let mut prev_raw = full.prior;
        let mut prev = full.prior;
        for k in 1..=ops.len() {
            let r = posterior_class(&g, &PosteriorQuery { param: t, observed: all[..k].to_vec() }).unwrap();
            let (_, term) = r.terms[k - 1];
            let shrinks = match (term.triple(), prev_raw.triple()) {
                (Some((nu, _, rho)), Some((_, _, acc_rho))) => nu <= 0.0 && rho >= acc_rho,
                _ => true,
            };
            if shrinks {
                prop_assert_ne!(compare(&r.class.class, &prev, 1e-9), Heaviness::Heavier, "{} vs {} after {} obs", r.class.class, prev, k);
            }
            prev = r.class.class;
            prev_raw = gga_core::Algebra64::default().density_product_raw(prev_raw, term).class;
        }
    }
}
