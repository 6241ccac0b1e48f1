//! Products of `2^k` standard normals and their log-normal limit.

use std::f64::consts::PI;

use gga_core::{representative, Algebra64, RepresentativeConfig64, RepresentativeSampler, TailClass64};

use crate::error::VerifyError;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `exp(E ln |X|)` for a standard normal `X`.
pub fn tau() -> f64 {
    (-(EULER_GAMMA + std::f64::consts::LN_2) / 2.0).exp()
}

/// `Var ln |X|` for a standard normal `X`.
pub const LOG_ABS_NORMAL_VAR: f64 = PI * PI / 8.0;

/// Class of `Z_k`, a product of `2^k` independent standard normals, by
/// repeated self-multiplication.
pub fn product_class(k: u32) -> TailClass64 {
    let alg = Algebra64::default();
    let mut z = TailClass64::gengamma(0.0, 0.5, 2.0);
    for _ in 0..k {
        z = alg.multiply(z, z);
    }
    z
}

/// Class of `V_k = (|Z_k| / tau^(2^k))^(2^(-k/2))`, which converges to a
/// log-normal with log-variance `pi^2 / 8`.
pub fn normalized_class(k: u32) -> Result<TailClass64, VerifyError> {
    let alg = Algebra64::default();
    let n = 2f64.powi(k as i32);
    let scaled = alg.scalar_mul(tau().powf(-n), product_class(k))?;
    Ok(alg.power(scaled, n.sqrt().recip())?)
}

pub fn lognormal_logpdf(x: f64, log_var: f64) -> f64 {
    let l = x.ln();
    -l - 0.5 * (2.0 * PI * log_var).ln() - l * l / (2.0 * log_var)
}

/// Largest gap between the folded representative log density of `V_k` and
/// the limiting log-normal log density on a log-spaced grid over `[lo, hi]`.
pub fn recursion_sup_error(k: u32, cfg: &RepresentativeConfig64, lo: f64, hi: f64, points: usize) -> Result<f64, VerifyError> {
    let spec = representative(&normalized_class(k)?, cfg)?;
    let sampler = RepresentativeSampler::new(&spec)?;
    let step = (hi / lo).ln() / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let x = lo * (step * i as f64).exp();
            let folded = std::f64::consts::LN_2 + sampler.logpdf(x);
            (folded - lognormal_logpdf(x, LOG_ABS_NORMAL_VAR)).abs()
        })
        .fold(0.0, f64::max))
}
