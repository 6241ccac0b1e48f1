use crate::scalar::Scalar;

/// `ln Γ(x)` for `x > 0`, evaluated in double precision.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    T::lit(statrs::function::gamma::ln_gamma(x.to64()))
}

/// `ln E[X^r]` for the generalized Gamma density `∝ x^nu exp(-sigma x^rho)` on `(0, ∞)`.
pub fn log_moment<T: Scalar>(nu: T, sigma: T, rho: T, r: T) -> T {
    let a = (nu + T::one()) / rho;
    -(r / rho) * sigma.ln() + ln_gamma(a + r / rho) - ln_gamma(a)
}
