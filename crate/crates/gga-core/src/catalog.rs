use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::rng::{finite_draw, gamma_variate, ln_gamma_variate, Provenance, RngStream, Sample};
use crate::scalar::Scalar;
use crate::tail::TailClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Normal,
    HalfNormal,
    Exponential,
    Gamma,
    InverseGamma,
    ChiSquared,
    InverseChiSquared,
    Chi,
    Weibull,
    Frechet,
    Pareto,
    StudentT,
    Cauchy,
    Laplace,
    Logistic,
    Gumbel,
    Rayleigh,
    Levy,
    Lomax,
    BetaPrime,
    LogLaplace,
    LogLogistic,
    LogCauchy,
    Burr,
    MaxwellBoltzmann,
    GeneralizedNormal,
    HyperbolicSecant,
    Uniform,
    // Tail class known, no closed-form density.
    Stable,
    GeometricStable,
    Holtsmark,
    TracyWidom,
    Voigt,
    SkewNormal,
    // Log-normal-type tails, outside the algebra.
    LogNormal,
    Benini,
    BenktanderI,
    JohnsonSu,
}

struct Entry {
    family: Family,
    name: &'static str,
    aliases: &'static [&'static str],
    params: &'static [&'static str],
}

const CATALOG: &[Entry] = &[
    Entry { family: Family::Normal, name: "Normal", aliases: &["gaussian"], params: &["mu", "sigma"] },
    Entry { family: Family::HalfNormal, name: "HalfNormal", aliases: &[], params: &["sigma"] },
    Entry { family: Family::Exponential, name: "Exponential", aliases: &["exp"], params: &["rate"] },
    Entry { family: Family::Gamma, name: "Gamma", aliases: &[], params: &["shape", "rate"] },
    Entry { family: Family::InverseGamma, name: "InverseGamma", aliases: &["invgamma"], params: &["shape", "scale"] },
    Entry { family: Family::ChiSquared, name: "ChiSquared", aliases: &["chi2", "chisq"], params: &["k"] },
    Entry { family: Family::InverseChiSquared, name: "InverseChiSquared", aliases: &["invchi2"], params: &["k"] },
    Entry { family: Family::Chi, name: "Chi", aliases: &[], params: &["k"] },
    Entry { family: Family::Weibull, name: "Weibull", aliases: &[], params: &["scale", "shape"] },
    Entry { family: Family::Frechet, name: "Frechet", aliases: &[], params: &["shape", "scale"] },
    Entry { family: Family::Pareto, name: "Pareto", aliases: &[], params: &["x0", "alpha"] },
    Entry { family: Family::StudentT, name: "StudentT", aliases: &["t"], params: &["df"] },
    Entry { family: Family::Cauchy, name: "Cauchy", aliases: &[], params: &["loc", "scale"] },
    Entry { family: Family::Laplace, name: "Laplace", aliases: &[], params: &["mu", "scale"] },
    Entry { family: Family::Logistic, name: "Logistic", aliases: &[], params: &["mu", "scale"] },
    Entry { family: Family::Gumbel, name: "Gumbel", aliases: &[], params: &["mu", "beta"] },
    Entry { family: Family::Rayleigh, name: "Rayleigh", aliases: &[], params: &["sigma"] },
    Entry { family: Family::Levy, name: "Levy", aliases: &[], params: &["mu", "c"] },
    Entry { family: Family::Lomax, name: "Lomax", aliases: &[], params: &["alpha", "scale"] },
    Entry { family: Family::BetaPrime, name: "BetaPrime", aliases: &[], params: &["alpha", "beta"] },
    Entry { family: Family::LogLaplace, name: "LogLaplace", aliases: &[], params: &["mu", "scale"] },
    Entry { family: Family::LogLogistic, name: "LogLogistic", aliases: &[], params: &["scale", "shape"] },
    Entry { family: Family::LogCauchy, name: "LogCauchy", aliases: &[], params: &["mu", "sigma"] },
    Entry { family: Family::Burr, name: "Burr", aliases: &[], params: &["c", "k"] },
    Entry { family: Family::MaxwellBoltzmann, name: "MaxwellBoltzmann", aliases: &["maxwell"], params: &["sigma"] },
    Entry { family: Family::GeneralizedNormal, name: "GeneralizedNormal", aliases: &[], params: &["mu", "alpha", "beta"] },
    Entry { family: Family::HyperbolicSecant, name: "HyperbolicSecant", aliases: &["sech"], params: &[] },
    Entry { family: Family::Uniform, name: "Uniform", aliases: &[], params: &["a", "b"] },
    Entry { family: Family::Stable, name: "Stable", aliases: &[], params: &["alpha"] },
    Entry { family: Family::GeometricStable, name: "GeometricStable", aliases: &[], params: &["alpha"] },
    Entry { family: Family::Holtsmark, name: "Holtsmark", aliases: &[], params: &[] },
    Entry { family: Family::TracyWidom, name: "TracyWidom", aliases: &[], params: &["beta"] },
    Entry { family: Family::Voigt, name: "Voigt", aliases: &[], params: &["sigma", "gamma"] },
    Entry { family: Family::SkewNormal, name: "SkewNormal", aliases: &[], params: &["xi", "omega", "alpha"] },
    Entry { family: Family::LogNormal, name: "LogNormal", aliases: &[], params: &["mu", "sigma"] },
    Entry { family: Family::Benini, name: "Benini", aliases: &[], params: &["alpha", "beta", "sigma"] },
    Entry { family: Family::BenktanderI, name: "BenktanderI", aliases: &["benktander1"], params: &["a", "b"] },
    Entry { family: Family::JohnsonSu, name: "JohnsonSu", aliases: &[], params: &["gamma", "delta", "xi", "lambda"] },
];

fn normalize(name: &str) -> String {
    name.chars().filter(|c| *c != '_' && *c != '-').flat_map(char::to_lowercase).collect()
}

impl Family {
    fn entry(self) -> &'static Entry {
        CATALOG.iter().find(|e| e.family == self).expect("every family has a catalog entry")
    }

    /// Case-, underscore- and hyphen-insensitive lookup.
    pub fn from_name(name: &str) -> Option<Family> {
        let n = normalize(name);
        CATALOG
            .iter()
            .find(|e| normalize(e.name) == n || e.aliases.iter().any(|a| normalize(a) == n))
            .map(|e| e.family)
    }

    pub fn name(self) -> &'static str {
        self.entry().name
    }

    pub fn param_names(self) -> &'static [&'static str] {
        self.entry().params
    }

    pub fn arity(self) -> usize {
        self.entry().params.len()
    }

    pub fn all() -> impl Iterator<Item = Family> {
        CATALOG.iter().map(|e| e.family)
    }

    pub fn has_lognormal_tail(self) -> bool {
        matches!(self, Family::LogNormal | Family::Benini | Family::BenktanderI | Family::JohnsonSu)
    }

    pub fn is_sampleable(self) -> bool {
        !self.has_lognormal_tail()
            && !matches!(
                self,
                Family::Stable | Family::GeometricStable | Family::Holtsmark | Family::TracyWidom | Family::Voigt | Family::SkewNormal
            )
    }

    /// Whether every draw is non-negative.
    pub fn nonnegative_support(self) -> bool {
        use Family::*;
        matches!(
            self,
            HalfNormal
                | Exponential
                | Gamma
                | InverseGamma
                | ChiSquared
                | InverseChiSquared
                | Chi
                | Weibull
                | Frechet
                | Pareto
                | Rayleigh
                | Lomax
                | BetaPrime
                | LogLaplace
                | LogLogistic
                | LogCauchy
                | Burr
                | MaxwellBoltzmann
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown distribution `{0}`")]
    UnknownFamily(String),
    #[error("{family} takes {expected} parameter(s), got {got}")]
    Arity { family: Family, expected: usize, got: usize },
    #[error("invalid parameters for {family}: {reason}")]
    InvalidParams { family: Family, reason: String },
    #[error("{0} has a log-normal-type tail, which the algebra cannot represent")]
    LogNormalTail(Family),
    #[error("{0} has no sampler or density in this catalog")]
    UnsupportedSampler(Family),
    #[error("gave up after repeated non-finite draws")]
    NonFinite,
    #[error("sample count must be at least one")]
    EmptySample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicDistribution {
    pub family: Family,
    pub params: Vec<f64>,
}

impl fmt::Display for AtomicDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl AtomicDistribution {
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self, CatalogError> {
        if params.len() != family.arity() {
            return Err(CatalogError::Arity { family, expected: family.arity(), got: params.len() });
        }
        let d = AtomicDistribution { family, params };
        d.validate()?;
        Ok(d)
    }

    pub fn by_name(name: &str, params: Vec<f64>) -> Result<Self, CatalogError> {
        let family = Family::from_name(name).ok_or_else(|| CatalogError::UnknownFamily(name.to_string()))?;
        Self::new(family, params)
    }

    fn p(&self, i: usize) -> f64 {
        self.params[i]
    }

    fn validate(&self) -> Result<(), CatalogError> {
        use Family::*;
        let bad = |reason: &str| Err(CatalogError::InvalidParams { family: self.family, reason: reason.to_string() });
        if self.params.iter().any(|p| !p.is_finite()) {
            return bad("parameters must be finite");
        }
        let pos = |i: usize| self.params[i] > 0.0;
        let names = self.family.param_names();
        let positive: &[usize] = match self.family {
            Normal | Cauchy | Laplace | Logistic | Gumbel | Levy | LogLaplace | LogCauchy | LogNormal => &[1],
            HalfNormal | Exponential | ChiSquared | InverseChiSquared | Chi | StudentT | Rayleigh | MaxwellBoltzmann | TracyWidom => &[0],
            Gamma | InverseGamma | Weibull | Frechet | Pareto | Lomax | BetaPrime | LogLogistic | Burr | Voigt | BenktanderI => &[0, 1],
            GeneralizedNormal | SkewNormal => &[1],
            Benini => &[0, 1, 2],
            JohnsonSu => &[1, 3],
            Stable | GeometricStable => &[0],
            HyperbolicSecant | Holtsmark | Uniform => &[],
        };
        for &i in positive {
            if !pos(i) {
                return bad(&format!("{} must be positive", names[i]));
            }
        }
        match self.family {
            GeneralizedNormal if !pos(2) => bad("beta must be positive"),
            Uniform if self.p(0) >= self.p(1) => bad("need a < b"),
            Stable if self.p(0) >= 2.0 => bad("alpha must lie in (0, 2)"),
            GeometricStable if self.p(0) > 2.0 => bad("alpha must lie in (0, 2]"),
            _ => Ok(()),
        }
    }

    /// Tail class from the univariate distribution table.
    pub fn class_of<T: Scalar>(&self) -> Result<TailClass<T>, CatalogError> {
        use Family::*;
        let gg = |nu: f64, sigma: f64, rho: f64| Ok(TailClass::gengamma(nu, sigma, rho));
        let rv = |alpha: f64| Ok(TailClass::rv(alpha));
        let half_inv_sq = |s: f64| 1.0 / (2.0 * s * s);
        let c: Result<TailClass<f64>, CatalogError> = match self.family {
            Normal => gg(0.0, half_inv_sq(self.p(1)), 2.0),
            HalfNormal => gg(0.0, half_inv_sq(self.p(0)), 2.0),
            Exponential => gg(0.0, self.p(0), 1.0),
            Gamma => gg(self.p(0) - 1.0, self.p(1), 1.0),
            InverseGamma => gg(-self.p(0) - 1.0, self.p(1), -1.0),
            ChiSquared => gg(self.p(0) / 2.0 - 1.0, 0.5, 1.0),
            InverseChiSquared => gg(-self.p(0) / 2.0 - 1.0, 0.5, -1.0),
            Chi => gg(self.p(0) - 1.0, 0.5, 2.0),
            Weibull => gg(self.p(1) - 1.0, self.p(0).powf(-self.p(1)), self.p(1)),
            Frechet => gg(-1.0 - self.p(0), self.p(1).powf(self.p(0)), -self.p(0)),
            Pareto => rv(self.p(1) + 1.0),
            StudentT => rv(self.p(0) + 1.0),
            Cauchy | Voigt => rv(2.0),
            Laplace | Logistic | Gumbel => gg(0.0, 1.0 / self.p(1), 1.0),
            Rayleigh => gg(1.0, half_inv_sq(self.p(0)), 2.0),
            Levy => gg(-1.5, self.p(1) / 2.0, -1.0),
            Lomax => rv(self.p(0) + 1.0),
            BetaPrime => rv(self.p(1) + 1.0),
            LogLaplace => rv(1.0 / self.p(1) + 1.0),
            LogLogistic => rv(self.p(1) + 1.0),
            LogCauchy => Ok(TailClass::SuperHeavy),
            Burr => rv(self.p(0) * self.p(1) + 1.0),
            MaxwellBoltzmann => gg(2.0, half_inv_sq(self.p(0)), 2.0),
            GeneralizedNormal => gg(0.0, self.p(1).powf(-self.p(2)), self.p(2)),
            HyperbolicSecant => gg(0.0, PI / 2.0, 1.0),
            Uniform => Ok(TailClass::SuperLight),
            Stable | GeometricStable => rv(self.p(0) + 1.0),
            Holtsmark => rv(2.5),
            TracyWidom => gg(-0.75 * self.p(0) - 1.0, 2.0 * self.p(0) / 3.0, 1.5),
            SkewNormal => gg(0.0, half_inv_sq(self.p(1)), 2.0),
            LogNormal | Benini | BenktanderI | JohnsonSu => Err(CatalogError::LogNormalTail(self.family)),
        };
        Ok(c?.canonicalize().cast())
    }

    /// One draw, possibly non-finite; callers go through [`finite_draw`].
    fn raw_draw(&self, rng: &mut RngStream) -> f64 {
        use Family::*;
        let p = &self.params;
        match self.family {
            Normal => p[0] + p[1] * rng.normal(),
            HalfNormal => p[0] * rng.normal().abs(),
            Exponential => -rng.uniform_pos().ln() / p[0],
            Gamma => gamma_variate(p[0], p[1], rng),
            InverseGamma => p[1] * (-ln_gamma_variate(p[0], rng)).exp(),
            ChiSquared => 2.0 * gamma_variate(p[0] / 2.0, 1.0, rng),
            InverseChiSquared => 0.5 * (-ln_gamma_variate(p[0] / 2.0, rng)).exp(),
            Chi => (0.5 * (LN_2 + ln_gamma_variate(p[0] / 2.0, rng))).exp(),
            Weibull => p[0] * (-rng.uniform_pos().ln()).powf(1.0 / p[1]),
            Frechet => p[1] * (-rng.uniform_pos().ln()).powf(-1.0 / p[0]),
            Pareto => p[0] * rng.uniform_pos().powf(-1.0 / p[1]),
            StudentT => student_t_draw(p[0], rng),
            Cauchy => p[0] + p[1] * (PI * (rng.uniform() - 0.5)).tan(),
            Laplace => {
                let e = -rng.uniform_pos().ln();
                p[0] + rng.sign() * p[1] * e
            }
            Logistic => {
                let u = rng.uniform_pos();
                p[0] + p[1] * (u / (1.0 - u)).ln()
            }
            Gumbel => p[0] - p[1] * (-rng.uniform_pos().ln()).ln(),
            Rayleigh => p[0] * (-2.0 * rng.uniform_pos().ln()).sqrt(),
            Levy => {
                let z = rng.normal();
                p[0] + p[1] / (z * z)
            }
            Lomax => p[1] * (rng.uniform_pos().powf(-1.0 / p[0]) - 1.0),
            BetaPrime => (ln_gamma_variate(p[0], rng) - ln_gamma_variate(p[1], rng)).exp(),
            LogLaplace => {
                let e = -rng.uniform_pos().ln();
                (p[0] + rng.sign() * p[1] * e).exp()
            }
            LogLogistic => {
                let u = rng.uniform_pos();
                p[0] * (u / (1.0 - u)).powf(1.0 / p[1])
            }
            LogCauchy => (p[0] + p[1] * (PI * (rng.uniform() - 0.5)).tan()).exp(),
            Burr => (rng.uniform_pos().powf(-1.0 / p[1]) - 1.0).powf(1.0 / p[0]),
            MaxwellBoltzmann => p[0] * (2.0 * gamma_variate(1.5, 1.0, rng)).sqrt(),
            GeneralizedNormal => p[0] + rng.sign() * p[1] * (ln_gamma_variate(1.0 / p[2], rng) / p[2]).exp(),
            HyperbolicSecant => 2.0 / PI * (PI * rng.uniform_pos() / 2.0).tan().ln(),
            Uniform => p[0] + (p[1] - p[0]) * rng.uniform(),
            _ => f64::NAN,
        }
    }

    pub fn check_sampleable(&self) -> Result<(), CatalogError> {
        if self.family.has_lognormal_tail() || !self.family.is_sampleable() {
            Err(CatalogError::UnsupportedSampler(self.family))
        } else {
            Ok(())
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> Result<f64, CatalogError> {
        self.check_sampleable()?;
        finite_draw(rng, |r| self.raw_draw(r)).ok_or(CatalogError::NonFinite)
    }

    /// Fills `out` with draws; cheaper than [`AtomicDistribution::sample`] for bulk work.
    pub fn fill(&self, rng: &mut RngStream, out: &mut [f64]) -> Result<(), CatalogError> {
        self.check_sampleable()?;
        for slot in out.iter_mut() {
            *slot = finite_draw(rng, |r| self.raw_draw(r)).ok_or(CatalogError::NonFinite)?;
        }
        Ok(())
    }

    pub fn sample_values(&self, rng: &mut RngStream, n: usize) -> Result<Vec<f64>, CatalogError> {
        if n == 0 {
            return Err(CatalogError::EmptySample);
        }
        let mut out = vec![0.0; n];
        self.fill(rng, &mut out)?;
        Ok(out)
    }

    pub fn sample(&self, rng: &mut RngStream, n: usize) -> Result<Vec<Sample>, CatalogError> {
        let values = self.sample_values(rng, n)?;
        Ok(with_provenance(rng, values))
    }

    pub fn logpdf(&self, x: f64) -> Result<f64, CatalogError> {
        use Family::*;
        self.check_sampleable()?;
        let p = &self.params;
        let neg_inf = f64::NEG_INFINITY;
        let half_ln_2pi = 0.5 * (2.0 * PI).ln();
        let v = match self.family {
            Normal => {
                let z = (x - p[0]) / p[1];
                -0.5 * z * z - p[1].ln() - half_ln_2pi
            }
            HalfNormal if x >= 0.0 => {
                let z = x / p[0];
                LN_2 - 0.5 * z * z - p[0].ln() - half_ln_2pi
            }
            Exponential if x >= 0.0 => p[0].ln() - p[0] * x,
            Gamma if x > 0.0 => p[0] * p[1].ln() - ln_gamma(p[0]) + (p[0] - 1.0) * x.ln() - p[1] * x,
            InverseGamma if x > 0.0 => p[0] * p[1].ln() - ln_gamma(p[0]) - (p[0] + 1.0) * x.ln() - p[1] / x,
            ChiSquared if x > 0.0 => {
                let h = p[0] / 2.0;
                -h * LN_2 - ln_gamma(h) + (h - 1.0) * x.ln() - x / 2.0
            }
            InverseChiSquared if x > 0.0 => {
                let h = p[0] / 2.0;
                -h * LN_2 - ln_gamma(h) - (h + 1.0) * x.ln() - 0.5 / x
            }
            Chi if x > 0.0 => {
                let h = p[0] / 2.0;
                (p[0] - 1.0) * x.ln() - x * x / 2.0 - (h - 1.0) * LN_2 - ln_gamma(h)
            }
            Weibull if x > 0.0 => {
                let z = x / p[0];
                p[1].ln() - p[0].ln() + (p[1] - 1.0) * z.ln() - z.powf(p[1])
            }
            Frechet if x > 0.0 => {
                let z = x / p[1];
                p[0].ln() - p[1].ln() - (1.0 + p[0]) * z.ln() - z.powf(-p[0])
            }
            Pareto if x >= p[0] => p[1].ln() + p[1] * p[0].ln() - (p[1] + 1.0) * x.ln(),
            StudentT => student_t_logpdf(p[0], x),
            Cauchy => {
                let z = (x - p[0]) / p[1];
                -(PI * p[1]).ln() - z.mul_add(z, 1.0).ln()
            }
            Laplace => -(2.0 * p[1]).ln() - (x - p[0]).abs() / p[1],
            Logistic => {
                let z = ((x - p[0]) / p[1]).abs();
                -z - p[1].ln() - 2.0 * (-z).exp().ln_1p()
            }
            Gumbel => {
                let z = (x - p[0]) / p[1];
                -p[1].ln() - (z + (-z).exp())
            }
            Rayleigh if x >= 0.0 => x.ln() - 2.0 * p[0].ln() - x * x / (2.0 * p[0] * p[0]),
            Levy if x > p[0] => {
                let d = x - p[0];
                0.5 * (p[1] / (2.0 * PI)).ln() - 1.5 * d.ln() - p[1] / (2.0 * d)
            }
            Lomax if x >= 0.0 => p[0].ln() - p[1].ln() - (p[0] + 1.0) * (x / p[1]).ln_1p(),
            BetaPrime if x > 0.0 => {
                let ln_beta = ln_gamma(p[0]) + ln_gamma(p[1]) - ln_gamma(p[0] + p[1]);
                (p[0] - 1.0) * x.ln() - (p[0] + p[1]) * x.ln_1p() - ln_beta
            }
            LogLaplace if x > 0.0 => -(2.0 * p[1]).ln() - x.ln() - (x.ln() - p[0]).abs() / p[1],
            LogLogistic if x > 0.0 => {
                let z = x / p[0];
                p[1].ln() - p[0].ln() + (p[1] - 1.0) * z.ln() - 2.0 * z.powf(p[1]).ln_1p()
            }
            LogCauchy if x > 0.0 => {
                let d = x.ln() - p[0];
                p[1].ln() - x.ln() - PI.ln() - (d * d + p[1] * p[1]).ln()
            }
            Burr if x > 0.0 => p[0].ln() + p[1].ln() + (p[0] - 1.0) * x.ln() - (p[1] + 1.0) * x.powf(p[0]).ln_1p(),
            MaxwellBoltzmann if x >= 0.0 => {
                0.5 * (2.0 / PI).ln() + 2.0 * x.ln() - x * x / (2.0 * p[0] * p[0]) - 3.0 * p[0].ln()
            }
            GeneralizedNormal => {
                p[2].ln() - (2.0 * p[1]).ln() - ln_gamma(1.0 / p[2]) - ((x - p[0]).abs() / p[1]).powf(p[2])
            }
            HyperbolicSecant => {
                let y = (PI * x / 2.0).abs();
                // ln cosh y without overflow
                -LN_2 - (y + (-2.0 * y).exp().ln_1p() - LN_2)
            }
            Uniform if x >= p[0] && x <= p[1] => -(p[1] - p[0]).ln(),
            _ => neg_inf,
        };
        Ok(v)
    }
}

pub(crate) fn with_provenance(rng: &RngStream, values: Vec<f64>) -> Vec<Sample> {
    let (seed, stream) = (rng.seed(), rng.stream());
    values
        .into_iter()
        .enumerate()
        .map(|(i, value)| Sample { value, provenance: Provenance { seed, stream, index: i as u64 } })
        .collect()
}

/// `Z / sqrt(V / df)` assembled in log space so small `df` cannot overflow early.
pub(crate) fn student_t_draw(df: f64, rng: &mut RngStream) -> f64 {
    let z = rng.normal();
    let ln_v_over_df = LN_2 + ln_gamma_variate(df / 2.0, rng) - df.ln();
    z.signum() * (z.abs().ln() - 0.5 * ln_v_over_df).exp()
}

pub(crate) fn student_t_logpdf(df: f64, x: f64) -> f64 {
    ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * PI).ln() - (df + 1.0) / 2.0 * (x * x / df).ln_1p()
}
