use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::special::log_moment;
use crate::tail::TailClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerLawRule {
    /// Match `E X^alpha = 2`.
    #[default]
    Moment,
    /// `|nu - sigma rho|`, a cheaper but coarser estimate.
    Linearized,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepresentativeConfig<T> {
    /// Shapes `rho` at or below this are represented by a Student-t.
    pub epsilon: T,
    pub alpha_bracket_max: T,
    pub root_tol: T,
    pub min_df: T,
    pub rule: PowerLawRule,
}

impl<T: Scalar> Default for RepresentativeConfig<T> {
    fn default() -> Self {
        RepresentativeConfig {
            epsilon: T::lit(0.1),
            alpha_bracket_max: T::lit(1e6),
            root_tol: T::lit(1e-9),
            min_df: T::lit(0.1),
            rule: PowerLawRule::Moment,
        }
    }
}

impl<T: Scalar> RepresentativeConfig<T> {
    pub fn validate(&self) -> Result<(), ReprError> {
        let ok = self.epsilon > T::zero()
            && self.epsilon < T::one()
            && self.alpha_bracket_max > T::one()
            && self.root_tol > T::zero()
            && self.min_df > T::zero();
        if ok {
            Ok(())
        } else {
            Err(ReprError::BadConfig)
        }
    }
}

/// A sampleable symmetric law whose tail lies in a given class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentativeSpec<T> {
    StudentT { df: T },
    /// Generalized Gamma magnitude with a random sign.
    SymGenGamma { nu: T, sigma: T, rho: T },
    /// Uniform bulk on `[0, x0)` joined to the exact tail density on `[x0, ∞)`, random sign.
    SplicedTail { nu: T, sigma: T, rho: T, x0: T },
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ReprError {
    #[error("E X^r stays below 2 for every r up to the bracket limit")]
    NoRoot,
    #[error("moments are undefined: (nu + 1) / rho must be positive with rho > 0")]
    InvalidClass,
    #[error("a super-light class has no tail representative")]
    SuperLight,
    #[error("invalid representative configuration")]
    BadConfig,
}

/// Solves `E X^alpha = 2` for the generalized Gamma law `(nu, sigma, rho)`.
pub fn powerlaw_alpha<T: Scalar>(nu: T, sigma: T, rho: T, cfg: &RepresentativeConfig<T>) -> Result<T, ReprError> {
    if !(rho > T::zero()) || !((nu + T::one()) / rho > T::zero()) || !(sigma > T::zero()) {
        return Err(ReprError::InvalidClass);
    }
    let ln2 = T::lit(std::f64::consts::LN_2);
    let f = |r: T| log_moment(nu, sigma, rho, r) - ln2;
    let mut lo = T::zero();
    let mut hi = T::one();
    loop {
        let v = f(hi);
        if v >= T::zero() {
            break;
        }
        if !v.is_finite() || hi >= cfg.alpha_bracket_max {
            return Err(ReprError::NoRoot);
        }
        lo = hi;
        hi = (hi + hi).min(cfg.alpha_bracket_max);
    }
    while hi - lo > cfg.root_tol {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}

fn linearized_alpha<T: Scalar>(nu: T, sigma: T, rho: T) -> T {
    (nu - sigma * rho).abs()
}

/// Mode of `x^nu exp(-sigma x^rho)` clipped below at one.
pub fn splice_point<T: Scalar>(nu: T, sigma: T, rho: T) -> T {
    if nu > T::zero() && rho > T::zero() {
        (nu / (sigma * rho)).powf(rho.recip()).max(T::one())
    } else {
        T::one()
    }
}

pub fn representative<T: Scalar>(a: &TailClass<T>, cfg: &RepresentativeConfig<T>) -> Result<RepresentativeSpec<T>, ReprError> {
    cfg.validate()?;
    let one = T::one();
    let student = |df: T| RepresentativeSpec::StudentT { df: df.max(cfg.min_df) };
    // Heavier than every power law with a finite index; df = 1/2 is a sampleable stand-in.
    let stand_in = RepresentativeSpec::StudentT { df: T::lit(0.5).max(cfg.min_df) };
    let spliced = |nu: T, sigma: T, rho: T| RepresentativeSpec::SplicedTail { nu, sigma, rho, x0: splice_point(nu, sigma, rho) };
    match *a {
        TailClass::SuperLight => Err(ReprError::SuperLight),
        TailClass::SuperHeavy => Ok(stand_in),
        TailClass::RegularlyVarying { alpha } => Ok(student(alpha - one)),
        TailClass::GenGamma { nu, rho, .. } if rho <= T::zero() => {
            if nu < -one {
                Ok(student(nu.abs() - one))
            } else {
                Ok(stand_in)
            }
        }
        TailClass::GenGamma { nu, sigma, rho } if rho > cfg.epsilon => {
            if (nu + one) / rho > T::zero() {
                Ok(RepresentativeSpec::SymGenGamma { nu, sigma, rho })
            } else {
                Ok(spliced(nu, sigma, rho))
            }
        }
        TailClass::GenGamma { nu, sigma, rho } => {
            let alpha = match cfg.rule {
                PowerLawRule::Moment => powerlaw_alpha(nu, sigma, rho, cfg),
                PowerLawRule::Linearized => Ok(linearized_alpha(nu, sigma, rho) - one),
            };
            match alpha {
                Ok(alpha) => Ok(student(alpha)),
                Err(ReprError::NoRoot) => Ok(RepresentativeSpec::SymGenGamma { nu, sigma, rho }),
                Err(ReprError::InvalidClass) => Ok(spliced(nu, sigma, rho)),
                Err(e) => Err(e),
            }
        }
    }
}

/// True when the representative only stands in for a class heavier than any power law.
pub fn is_stand_in<T: Scalar>(a: &TailClass<T>) -> bool {
    match *a {
        TailClass::SuperHeavy => true,
        TailClass::GenGamma { nu, rho, .. } => rho <= T::zero() && nu >= -T::one(),
        _ => false,
    }
}
