use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Asymptotic tail class of a density, up to its normalizing constant.
///
/// `GenGamma` stands for densities behaving like `x^nu * exp(-sigma * x^rho)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailClass<T> {
    #[serde(rename = "gengamma")]
    GenGamma { nu: T, sigma: T, rho: T },
    /// Density decays like `x^-alpha`.
    #[serde(rename = "rv")]
    RegularlyVarying { alpha: T },
    SuperHeavy,
    SuperLight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heaviness {
    Lighter,
    Equivalent,
    Heavier,
}

impl Heaviness {
    pub fn reverse(self) -> Self {
        match self {
            Heaviness::Lighter => Heaviness::Heavier,
            Heaviness::Equivalent => Heaviness::Equivalent,
            Heaviness::Heavier => Heaviness::Lighter,
        }
    }
}

impl<T: Scalar> TailClass<T> {
    pub fn gengamma(nu: T, sigma: T, rho: T) -> Self {
        TailClass::GenGamma { nu, sigma, rho }
    }

    pub fn rv(alpha: T) -> Self {
        TailClass::RegularlyVarying { alpha }
    }

    /// Rewrites `rho == 0` classes to their power-law (or super-heavy) form.
    pub fn canonicalize(self) -> Self {
        match self {
            TailClass::GenGamma { nu, rho, .. } if rho == T::zero() => {
                if nu < -T::one() {
                    TailClass::RegularlyVarying { alpha: nu.abs() }
                } else {
                    TailClass::SuperHeavy
                }
            }
            TailClass::RegularlyVarying { alpha } if alpha <= T::one() => TailClass::SuperHeavy,
            other => other,
        }
    }

    pub fn is_canonical(&self) -> bool {
        match *self {
            TailClass::GenGamma { nu, sigma, rho } => {
                nu.is_finite() && sigma.is_finite() && rho.is_finite() && sigma > T::zero() && rho != T::zero()
            }
            TailClass::RegularlyVarying { alpha } => alpha.is_finite() && alpha > T::one(),
            TailClass::SuperHeavy | TailClass::SuperLight => true,
        }
    }

    pub fn is_super_light(&self) -> bool {
        matches!(self, TailClass::SuperLight)
    }

    /// `(nu, sigma, rho)` with power laws read as `(-alpha, 1, 0)`.
    pub fn triple(&self) -> Option<(T, T, T)> {
        match *self {
            TailClass::GenGamma { nu, sigma, rho } => Some((nu, sigma, rho)),
            TailClass::RegularlyVarying { alpha } => Some((-alpha, T::one(), T::zero())),
            _ => None,
        }
    }

    pub fn cast<U: Scalar>(self) -> TailClass<U> {
        let c = |x: T| U::lit(x.to64());
        match self {
            TailClass::GenGamma { nu, sigma, rho } => TailClass::GenGamma { nu: c(nu), sigma: c(sigma), rho: c(rho) },
            TailClass::RegularlyVarying { alpha } => TailClass::RegularlyVarying { alpha: c(alpha) },
            TailClass::SuperHeavy => TailClass::SuperHeavy,
            TailClass::SuperLight => TailClass::SuperLight,
        }
    }

    fn variant_rank(&self) -> u8 {
        match self {
            TailClass::SuperHeavy => 0,
            TailClass::RegularlyVarying { .. } => 1,
            TailClass::GenGamma { .. } => 2,
            TailClass::SuperLight => 3,
        }
    }

    /// Total order on representations, used only to break ties between
    /// classes that `compare` deems equivalent.
    pub fn structural_cmp(&self, other: &Self) -> Ordering {
        self.variant_rank().cmp(&other.variant_rank()).then_with(|| match (self, other) {
            (TailClass::RegularlyVarying { alpha: a }, TailClass::RegularlyVarying { alpha: b }) => a.total_cmp(b),
            (
                TailClass::GenGamma { nu: n1, sigma: s1, rho: r1 },
                TailClass::GenGamma { nu: n2, sigma: s2, rho: r2 },
            ) => r1.total_cmp(r2).then(s1.total_cmp(s2)).then(n1.total_cmp(n2)),
            _ => Ordering::Equal,
        })
    }
}

impl<T: Scalar> fmt::Display for TailClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailClass::GenGamma { nu, sigma, rho } => write!(f, "({nu}, {sigma}, {rho})"),
            TailClass::RegularlyVarying { alpha } => write!(f, "R_{alpha}"),
            TailClass::SuperHeavy => f.write_str("R_1"),
            TailClass::SuperLight => f.write_str("L"),
        }
    }
}

pub(crate) fn approx_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    a == b || (a - b).abs() <= tol * T::one().max(a.abs()).max(b.abs())
}

enum Key<T> {
    Heavy,
    Poly(T),
    Exp { rho: T, sigma: T, nu: T },
    Light,
}

fn key<T: Scalar>(a: &TailClass<T>) -> Key<T> {
    match *a {
        TailClass::SuperHeavy => Key::Heavy,
        TailClass::SuperLight => Key::Light,
        TailClass::RegularlyVarying { alpha } => Key::Poly(-alpha),
        TailClass::GenGamma { nu, rho, .. } if rho <= T::zero() => Key::Poly(nu),
        TailClass::GenGamma { nu, sigma, rho } => Key::Exp { rho, sigma, nu },
    }
}

fn smaller_is_lighter<T: Scalar>(a: T, b: T, tol: T) -> Heaviness {
    if approx_eq(a, b, tol) {
        Heaviness::Equivalent
    } else if a < b {
        Heaviness::Lighter
    } else {
        Heaviness::Heavier
    }
}

/// Heaviness of `a` relative to `b`.
pub fn compare<T: Scalar>(a: &TailClass<T>, b: &TailClass<T>, tol: T) -> Heaviness {
    use Heaviness::*;
    match (key(a), key(b)) {
        (Key::Heavy, Key::Heavy) | (Key::Light, Key::Light) => Equivalent,
        (Key::Heavy, _) | (_, Key::Light) => Heavier,
        (_, Key::Heavy) | (Key::Light, _) => Lighter,
        (Key::Poly(n1), Key::Poly(n2)) => smaller_is_lighter(n1, n2, tol),
        (Key::Poly(_), Key::Exp { .. }) => Heavier,
        (Key::Exp { .. }, Key::Poly(_)) => Lighter,
        (Key::Exp { rho: r1, sigma: s1, nu: n1 }, Key::Exp { rho: r2, sigma: s2, nu: n2 }) => {
            if !approx_eq(r1, r2, tol) {
                smaller_is_lighter(r1, r2, tol).reverse()
            } else if !approx_eq(s1, s2, tol) {
                smaller_is_lighter(s1, s2, tol).reverse()
            } else {
                smaller_is_lighter(n1, n2, tol)
            }
        }
    }
}

/// The heavier of two classes; equivalent classes resolve by representation
/// so the result does not depend on argument order.
pub fn max_class<T: Scalar>(a: TailClass<T>, b: TailClass<T>, tol: T) -> TailClass<T> {
    match compare(&a, &b, tol) {
        Heaviness::Heavier => a,
        Heaviness::Lighter => b,
        Heaviness::Equivalent => {
            if a.structural_cmp(&b) == Ordering::Less {
                b
            } else {
                a
            }
        }
    }
}
