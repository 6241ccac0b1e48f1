use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::tail::{approx_eq, compare, max_class, Heaviness, TailClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Caveat {
    /// The result is an upper bound on heaviness rather than an equivalence.
    Conservative,
    /// The result is a projection onto the nearest class the algebra can express.
    Projection,
}

/// An operation result together with the caveats it accrued.
#[derive(Clone, Debug, PartialEq)]
pub struct Tagged<T> {
    pub class: TailClass<T>,
    pub caveats: Vec<Caveat>,
}

impl<T> Tagged<T> {
    pub fn exact(class: TailClass<T>) -> Self {
        Tagged { class, caveats: Vec::new() }
    }

    pub fn with(class: TailClass<T>, caveat: Caveat) -> Self {
        Tagged { class, caveats: vec![caveat] }
    }

    pub fn absorb(mut self, caveats: &[Caveat]) -> Self {
        for c in caveats {
            if !self.caveats.contains(c) {
                self.caveats.push(*c);
            }
        }
        self.caveats.sort();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AlgebraError {
    #[error("scalar multiplication by zero (the constant should have been folded)")]
    ZeroScalar,
    #[error("power with exponent zero")]
    ZeroPower,
    #[error("lipschitz needs at least one argument")]
    EmptyLipschitz,
    #[error("lipschitz constant must be positive, got {0}")]
    BadLipschitzConstant(f64),
    #[error("Hölder exponent must lie in (0, 1], got {0}")]
    BadHolderExponent(f64),
}

/// Tail-class operations with a configurable tolerance for deciding
/// whether two shape parameters `rho` coincide.
#[derive(Clone, Copy, Debug)]
pub struct Algebra<T> {
    pub rho_eq_tol: T,
}

impl<T: Scalar> Default for Algebra<T> {
    fn default() -> Self {
        Algebra { rho_eq_tol: T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) }
    }
}

fn log_sum_exp<T: Scalar>(a: T, b: T) -> T {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl<T: Scalar> Algebra<T> {
    pub fn new(rho_eq_tol: T) -> Self {
        Algebra { rho_eq_tol }
    }

    fn rho_eq(&self, a: T, b: T) -> bool {
        approx_eq(a, b, self.rho_eq_tol)
    }

    fn merged_rho(a: T, b: T) -> T {
        if a == b {
            a
        } else {
            (a + b) / T::lit(2.0)
        }
    }

    pub fn compare(&self, a: &TailClass<T>, b: &TailClass<T>) -> Heaviness {
        compare(a, b, self.rho_eq_tol)
    }

    pub fn max_class(&self, a: TailClass<T>, b: TailClass<T>) -> TailClass<T> {
        max_class(a, b, self.rho_eq_tol)
    }

    pub fn add(&self, a: TailClass<T>, b: TailClass<T>) -> TailClass<T> {
        let (
            TailClass::GenGamma { nu: n1, sigma: s1, rho: r1 },
            TailClass::GenGamma { nu: n2, sigma: s2, rho: r2 },
        ) = (a, b)
        else {
            return self.max_class(a, b);
        };
        if !self.rho_eq(r1, r2) {
            return self.max_class(a, b);
        }
        let one = T::one();
        let rho = Self::merged_rho(r1, r2);
        if self.rho_eq(rho, one) {
            TailClass::gengamma(n1 + n2 + one, s1.min(s2), one)
        } else if rho > one {
            let e = -one / (rho - one);
            let direct = (s1.powf(e) + s2.powf(e)).powf(one - rho);
            let sigma = if direct.is_finite() && direct > T::zero() {
                direct
            } else {
                ((one - rho) * log_sum_exp(e * s1.ln(), e * s2.ln())).exp()
            };
            TailClass::gengamma(n1 + n2 + one - rho / T::lit(2.0), sigma, rho)
        } else {
            self.max_class(a, b)
        }
    }

    pub fn scalar_mul(&self, c: T, a: TailClass<T>) -> Result<TailClass<T>, AlgebraError> {
        if c == T::zero() {
            return Err(AlgebraError::ZeroScalar);
        }
        Ok(match a {
            TailClass::GenGamma { nu, sigma, rho } => TailClass::gengamma(nu, sigma * c.abs().powf(-rho), rho),
            other => other,
        })
    }

    pub fn translate(&self, a: TailClass<T>, _c: T) -> TailClass<T> {
        a
    }

    pub fn power(&self, a: TailClass<T>, beta: T) -> Result<TailClass<T>, AlgebraError> {
        Ok(self.power_tagged(a, beta)?.class)
    }

    pub fn power_tagged(&self, a: TailClass<T>, beta: T) -> Result<Tagged<T>, AlgebraError> {
        if beta == T::zero() {
            return Err(AlgebraError::ZeroPower);
        }
        if beta < T::zero() {
            let p = self.power_positive(a, -beta);
            return Ok(self.reciprocal_tagged(p));
        }
        Ok(Tagged::exact(self.power_positive(a, beta)))
    }

    fn power_positive(&self, a: TailClass<T>, beta: T) -> TailClass<T> {
        let one = T::one();
        if beta == one {
            return a;
        }
        match a {
            TailClass::GenGamma { nu, sigma, rho } => {
                TailClass::gengamma((nu + one) / beta - one, sigma, rho / beta).canonicalize()
            }
            TailClass::RegularlyVarying { alpha } => TailClass::rv((alpha - one) / beta + one).canonicalize(),
            other => other,
        }
    }

    pub fn reciprocal(&self, a: TailClass<T>) -> TailClass<T> {
        self.reciprocal_tagged(a).class
    }

    /// The reciprocal of a super-light (constant-like) class is returned as
    /// super-light with a projection caveat: a constant at zero would break this.
    pub fn reciprocal_tagged(&self, a: TailClass<T>) -> Tagged<T> {
        match a {
            TailClass::GenGamma { nu, sigma, rho } if rho != T::zero() && (nu + T::one()) / rho > T::zero() => {
                Tagged::exact(TailClass::gengamma(-nu - T::lit(2.0), sigma, -rho))
            }
            TailClass::SuperLight => Tagged::with(TailClass::SuperLight, Caveat::Projection),
            _ => Tagged::exact(TailClass::rv(T::lit(2.0))),
        }
    }

    pub fn multiply(&self, a: TailClass<T>, b: TailClass<T>) -> TailClass<T> {
        self.multiply_tagged(a, b).class
    }

    pub fn multiply_tagged(&self, a: TailClass<T>, b: TailClass<T>) -> Tagged<T> {
        use TailClass::*;
        match (a, b) {
            (SuperLight, x) | (x, SuperLight) => Tagged::exact(x),
            (SuperHeavy, _) | (_, SuperHeavy) => Tagged::exact(SuperHeavy),
            (RegularlyVarying { alpha: a1 }, RegularlyVarying { alpha: a2 }) => Tagged::exact(TailClass::rv(a1.min(a2))),
            (GenGamma { nu, rho, .. }, RegularlyVarying { alpha }) | (RegularlyVarying { alpha }, GenGamma { nu, rho, .. }) => {
                if rho > T::zero() {
                    Tagged::exact(TailClass::rv(alpha))
                } else {
                    let heavier = nu.abs().min(alpha);
                    Tagged::with(TailClass::gengamma(-heavier, T::one(), T::zero()).canonicalize(), Caveat::Conservative)
                }
            }
            (GenGamma { nu: n1, sigma: s1, rho: r1 }, GenGamma { nu: n2, sigma: s2, rho: r2 }) => {
                let zero = T::zero();
                if r1 < zero && r2 > zero {
                    return Tagged::exact(TailClass::gengamma(n1, T::one(), zero).canonicalize());
                }
                if r2 < zero && r1 > zero {
                    return Tagged::exact(TailClass::gengamma(n2, T::one(), zero).canonicalize());
                }
                let (a1, a2) = (r1.abs(), r2.abs());
                let mu = a1.recip() + a2.recip();
                let sigma = Self::product_sigma(mu, s1 * a1, a1, s2 * a2, a2);
                let half = T::lit(0.5);
                let class = if r1 < zero {
                    TailClass::gengamma((n1 / a1 + n2 / a2 + half) / mu, sigma, -mu.recip())
                } else {
                    TailClass::gengamma((n1 / a1 + n2 / a2 - half) / mu, sigma, mu.recip())
                };
                Tagged::exact(class)
            }
        }
    }

    /// `mu * b1^(1/(mu a1)) * b2^(1/(mu a2))`; the two exponents sum to one,
    /// so the direct evaluation only fails for extreme bases.
    fn product_sigma(mu: T, b1: T, a1: T, b2: T, a2: T) -> T {
        let e1 = (mu * a1).recip();
        let e2 = (mu * a2).recip();
        let core = if e1 == e2 { (b1 * b2).powf(e1) } else { b1.powf(e1) * b2.powf(e2) };
        let direct = mu * core;
        if direct.is_finite() && direct > T::zero() {
            direct
        } else {
            (mu.ln() + e1 * b1.ln() + e2 * b2.ln()).exp()
        }
    }

    pub fn divide(&self, a: TailClass<T>, b: TailClass<T>) -> TailClass<T> {
        self.divide_tagged(a, b).class
    }

    pub fn divide_tagged(&self, a: TailClass<T>, b: TailClass<T>) -> Tagged<T> {
        let r = self.reciprocal_tagged(b);
        let caveats = r.caveats.clone();
        self.multiply_tagged(a, r.class).absorb(&caveats)
    }

    pub fn density_product(&self, a: TailClass<T>, b: TailClass<T>) -> TailClass<T> {
        self.density_product_tagged(a, b).class
    }

    pub fn density_product_tagged(&self, a: TailClass<T>, b: TailClass<T>) -> Tagged<T> {
        let mut t = self.density_product_raw(a, b);
        t.class = t.class.canonicalize();
        t
    }

    /// Density product without the final canonicalization, so that
    /// polynomial factors `(m, 1, 0)` can be accumulated before the result
    /// is read as a class.
    pub fn density_product_raw(&self, a: TailClass<T>, b: TailClass<T>) -> Tagged<T> {
        let (Some((n1, s1, r1)), Some((n2, s2, r2))) = (as_factor(&a), as_factor(&b)) else {
            return match (a, b) {
                (TailClass::SuperLight, x) | (x, TailClass::SuperLight) => Tagged::exact(x),
                _ => unreachable!("only super-light has no factor form"),
            };
        };
        let nu = n1 + n2;
        if self.rho_eq(r1, r2) {
            return Tagged::exact(TailClass::gengamma(nu, s1 + s2, Self::merged_rho(r1, r2)));
        }
        let ((sigma, rho), dropped_rho) = if r1 < r2 { ((s1, r1), r2) } else { ((s2, r2), r1) };
        let class = TailClass::gengamma(nu, sigma, rho);
        if dropped_rho > T::zero() {
            Tagged::with(class, Caveat::Conservative)
        } else {
            Tagged::exact(class)
        }
    }

    pub fn exp_class(&self, a: TailClass<T>) -> TailClass<T> {
        self.exp_tagged(a).class
    }

    pub fn exp_tagged(&self, a: TailClass<T>) -> Tagged<T> {
        match a {
            TailClass::SuperLight => Tagged::exact(a),
            TailClass::GenGamma { sigma, rho, .. } if rho >= T::one() - self.rho_eq_tol => {
                Tagged::with(TailClass::rv(sigma + T::one()).canonicalize(), Caveat::Conservative)
            }
            _ => Tagged::with(TailClass::SuperHeavy, Caveat::Conservative),
        }
    }

    pub fn log_class(&self, a: TailClass<T>) -> TailClass<T> {
        self.log_tagged(a).class
    }

    pub fn log_tagged(&self, a: TailClass<T>) -> Tagged<T> {
        let one = T::one();
        match a {
            TailClass::RegularlyVarying { alpha } => Tagged::exact(TailClass::gengamma(T::zero(), alpha - one, one)),
            TailClass::GenGamma { nu, rho, .. } if rho <= T::zero() && nu < -one => {
                Tagged::exact(TailClass::gengamma(T::zero(), nu.abs() - one, one))
            }
            TailClass::GenGamma { rho, .. } if rho <= T::zero() => Tagged::with(TailClass::SuperHeavy, Caveat::Conservative),
            TailClass::SuperHeavy => Tagged::with(TailClass::SuperHeavy, Caveat::Conservative),
            TailClass::SuperLight => Tagged::exact(a),
            TailClass::GenGamma { .. } => Tagged::with(TailClass::SuperLight, Caveat::Projection),
        }
    }

    pub fn lipschitz(&self, l: T, holder_alpha: T, args: &[TailClass<T>]) -> Result<TailClass<T>, AlgebraError> {
        Ok(self.lipschitz_tagged(l, holder_alpha, args)?.class)
    }

    pub fn lipschitz_tagged(&self, l: T, holder_alpha: T, args: &[TailClass<T>]) -> Result<Tagged<T>, AlgebraError> {
        if args.is_empty() {
            return Err(AlgebraError::EmptyLipschitz);
        }
        if !(l > T::zero()) || !l.is_finite() {
            return Err(AlgebraError::BadLipschitzConstant(l.to64()));
        }
        if !(holder_alpha > T::zero() && holder_alpha <= T::one()) {
            return Err(AlgebraError::BadHolderExponent(holder_alpha.to64()));
        }
        let mut acc = TailClass::SuperLight;
        for a in args {
            acc = self.max_class(acc, self.power(*a, holder_alpha)?);
        }
        Ok(Tagged::with(self.scalar_mul(l, acc)?, Caveat::Conservative))
    }

    /// `n`-fold sum of independent copies, evaluated by repeated doubling.
    pub fn iid_sum(&self, a: TailClass<T>, n: u64) -> TailClass<T> {
        assert!(n >= 1, "iid sum needs at least one term");
        let mut acc = a;
        for _ in 1..n {
            let next = self.add(acc, a);
            if next == acc {
                return acc;
            }
            acc = next;
        }
        acc
    }
}

/// Density-factor form `(nu, sigma, rho)`: power laws as `(-alpha, 1, 0)`
/// and the super-heavy sentinel as `(-1, 1, 0)`.
fn as_factor<T: Scalar>(a: &TailClass<T>) -> Option<(T, T, T)> {
    match *a {
        TailClass::SuperHeavy => Some((-T::one(), T::one(), T::zero())),
        TailClass::SuperLight => None,
        _ => a.triple(),
    }
}
