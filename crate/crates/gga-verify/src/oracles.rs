//! Closed-form densities used to check predicted classes.

use gga_core::TailClass64;

use crate::quad::ln_bessel_k;

/// Log density of the product of two independent `Exponential(lambda)`
/// variables, `2 lambda^2 K_0(2 lambda sqrt z)`.
pub fn exp_product_logpdf(lambda: f64, z: f64) -> f64 {
    (2.0 * lambda * lambda).ln() + ln_bessel_k(0.0, 2.0 * lambda * z.sqrt())
}

/// `d/dz` of [`exp_product_logpdf`], using `K_0' = -K_1`.
pub fn exp_product_log_slope(lambda: f64, z: f64) -> f64 {
    let x = 2.0 * lambda * z.sqrt();
    -(ln_bessel_k(1.0, x) - ln_bessel_k(0.0, x)).exp() * lambda / z.sqrt()
}

/// `d/dz` of `nu ln z - sigma z^rho`, the log density slope a class predicts.
pub fn class_log_slope(class: &TailClass64, z: f64) -> Option<f64> {
    match *class {
        TailClass64::GenGamma { nu, sigma, rho } => Some(nu / z - sigma * rho * z.powf(rho - 1.0)),
        TailClass64::RegularlyVarying { alpha } => Some(-alpha / z),
        _ => None,
    }
}
