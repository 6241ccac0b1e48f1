//! Numerical integration used by the oracles.

use std::f64::consts::FRAC_PI_2;

const MAX_LEVEL: u32 = 12;
const T_MAX: f64 = 4.0;

/// Double-exponential quadrature of `f` over `[a, b]`. The integrand gets
/// `(x, x - a, b - x)` with the endpoint distances computed without
/// cancellation, so integrable endpoint singularities can be resolved.
pub fn tanh_sinh(a: f64, b: f64, tol: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let hw = 0.5 * (b - a);
    if hw <= 0.0 {
        return 0.0;
    }
    let term = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let da = 2.0 * hw / (1.0 + (-2.0 * u).exp());
        let db = 2.0 * hw / (1.0 + (2.0 * u).exp());
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        let v = f(a + da, da, db) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        let t = k as f64 * h;
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut est = hw * h * sum;
    for _ in 1..MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            let t = k as f64 * h;
            sum += term(t) + term(-t);
            k += 2;
        }
        let next = hw * h * sum;
        if (next - est).abs() <= tol * next.abs() {
            return next;
        }
        est = next;
    }
    est
}

/// `ln K_nu(x)` for `x > 0` from `K_nu(x) = ∫_0^∞ exp(-x cosh t) cosh(nu t) dt`,
/// summed by the trapezoid rule, which converges geometrically here.
pub fn ln_bessel_k(nu: f64, x: f64) -> f64 {
    let h = 1.0 / 64.0;
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let term = (-x * (t.cosh() - 1.0) + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    -x + (h * sum).ln()
}
