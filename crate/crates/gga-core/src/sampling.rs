use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::catalog::{student_t_draw, student_t_logpdf, with_provenance};
use crate::representative::RepresentativeSpec;
use crate::rng::{finite_draw, ln_gamma_variate, RngStream, Sample};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SampleError {
    #[error("invalid generalized Gamma parameters: need sigma > 0, rho != 0 and (nu + 1) / rho > 0")]
    InvalidGenGamma,
    #[error("invalid representative: {0}")]
    InvalidSpec(&'static str),
    #[error("gave up after repeated non-finite draws")]
    NonFinite,
    #[error("sample count must be at least one")]
    EmptySample,
}

fn check_gen_gamma(nu: f64, sigma: f64, rho: f64) -> Result<(), SampleError> {
    let ok = sigma > 0.0 && sigma.is_finite() && rho != 0.0 && rho.is_finite() && (nu + 1.0) / rho > 0.0;
    if ok {
        Ok(())
    } else {
        Err(SampleError::InvalidGenGamma)
    }
}

/// One draw of `X = G^(1/rho)`, `G ~ Gamma((nu + 1) / rho, rate sigma)`.
fn gen_gamma_draw(nu: f64, sigma: f64, rho: f64, rng: &mut RngStream) -> f64 {
    let ln_g = ln_gamma_variate((nu + 1.0) / rho, rng) - sigma.ln();
    (ln_g / rho).exp()
}

/// Draws from the density `∝ x^nu exp(-sigma x^rho)` on `(0, ∞)`; negative `rho` is allowed.
pub fn sample_gen_gamma(nu: f64, sigma: f64, rho: f64, rng: &mut RngStream, n: usize) -> Result<Vec<Sample>, SampleError> {
    check_gen_gamma(nu, sigma, rho)?;
    if n == 0 {
        return Err(SampleError::EmptySample);
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(finite_draw(rng, |r| gen_gamma_draw(nu, sigma, rho, r)).ok_or(SampleError::NonFinite)?);
    }
    Ok(with_provenance(rng, values))
}

/// Sampler and density for a [`RepresentativeSpec`], with any lookup
/// tables built once up front.
#[derive(Clone, Debug)]
pub enum RepresentativeSampler {
    StudentT { df: f64 },
    SymGenGamma { nu: f64, sigma: f64, rho: f64, ln_norm: f64 },
    Spliced(Box<SplicedTail>),
}

impl RepresentativeSampler {
    pub fn new(spec: &RepresentativeSpec<f64>) -> Result<Self, SampleError> {
        match *spec {
            RepresentativeSpec::StudentT { df } => {
                if df > 0.0 && df.is_finite() {
                    Ok(RepresentativeSampler::StudentT { df })
                } else {
                    Err(SampleError::InvalidSpec("Student-t needs df > 0"))
                }
            }
            RepresentativeSpec::SymGenGamma { nu, sigma, rho } => {
                check_gen_gamma(nu, sigma, rho)?;
                let a = (nu + 1.0) / rho;
                let ln_norm = (rho.abs() / 2.0).ln() + a * sigma.ln() - ln_gamma(a);
                Ok(RepresentativeSampler::SymGenGamma { nu, sigma, rho, ln_norm })
            }
            RepresentativeSpec::SplicedTail { nu, sigma, rho, x0 } => {
                Ok(RepresentativeSampler::Spliced(Box::new(SplicedTail::new(nu, sigma, rho, x0)?)))
            }
        }
    }

    fn raw_draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            RepresentativeSampler::StudentT { df } => student_t_draw(*df, rng),
            RepresentativeSampler::SymGenGamma { nu, sigma, rho, .. } => rng.sign() * gen_gamma_draw(*nu, *sigma, *rho, rng),
            RepresentativeSampler::Spliced(s) => rng.sign() * s.draw_magnitude(rng),
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> Result<f64, SampleError> {
        finite_draw(rng, |r| self.raw_draw(r)).ok_or(SampleError::NonFinite)
    }

    pub fn fill(&self, rng: &mut RngStream, out: &mut [f64]) -> Result<(), SampleError> {
        for slot in out.iter_mut() {
            *slot = self.draw(rng)?;
        }
        Ok(())
    }

    pub fn logpdf(&self, x: f64) -> f64 {
        match self {
            RepresentativeSampler::StudentT { df } => student_t_logpdf(*df, x),
            RepresentativeSampler::SymGenGamma { nu, sigma, rho, ln_norm } => {
                let ax = x.abs();
                if ax == 0.0 {
                    return if *nu == 0.0 && *rho > 0.0 { *ln_norm } else { f64::NEG_INFINITY };
                }
                ln_norm + nu * ax.ln() - sigma * ax.powf(*rho)
            }
            RepresentativeSampler::Spliced(s) => s.logpdf(x),
        }
    }
}

pub fn sample_representative(spec: &RepresentativeSpec<f64>, rng: &mut RngStream, n: usize) -> Result<Vec<Sample>, SampleError> {
    if n == 0 {
        return Err(SampleError::EmptySample);
    }
    let sampler = RepresentativeSampler::new(spec)?;
    let mut values = vec![0.0; n];
    sampler.fill(rng, &mut values)?;
    Ok(with_provenance(rng, values))
}

const GRID_KNOTS: usize = 4096;
const TAIL_EPS: f64 = 1e-12;
const INVERT_TOL: f64 = 1e-10;

const GL_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Uniform bulk on `[0, x0)` spliced to `x^nu exp(-sigma x^rho)` on `[x0, ∞)`.
///
/// Densities are kept relative to the tail density at `x0`, which is also the
/// bulk height, so large `sigma` cannot underflow.
#[derive(Clone, Debug)]
pub struct SplicedTail {
    nu: f64,
    sigma: f64,
    rho: f64,
    x0: f64,
    ln_g0: f64,
    knots: Vec<f64>,
    ln_knots: Vec<f64>,
    cum: Vec<f64>,
    slopes: Vec<f64>,
    remainder: f64,
    total: f64,
}

impl SplicedTail {
    pub fn new(nu: f64, sigma: f64, rho: f64, x0: f64) -> Result<Self, SampleError> {
        if !(sigma > 0.0 && rho > 0.0 && x0 > 0.0) || !(nu.is_finite() && sigma.is_finite() && rho.is_finite() && x0.is_finite()) {
            return Err(SampleError::InvalidSpec("spliced tail needs sigma, rho, x0 > 0"));
        }
        // Decreasing on [x0, ∞) requires x0 beyond the mode.
        if nu > 0.0 && x0.powf(rho) < nu / (sigma * rho) * (1.0 - 1e-12) {
            return Err(SampleError::InvalidSpec("spliced tail density must decrease past x0"));
        }
        let ln_g0 = nu * x0.ln() - sigma * x0.powf(rho);
        let mut s = SplicedTail {
            nu,
            sigma,
            rho,
            x0,
            ln_g0,
            knots: Vec::new(),
            ln_knots: Vec::new(),
            cum: Vec::new(),
            slopes: Vec::new(),
            remainder: 0.0,
            total: 0.0,
        };
        let xq = s.quantile_bound();
        let (a, b) = (x0.ln(), xq.ln());
        s.ln_knots = (0..GRID_KNOTS).map(|i| a + (b - a) * i as f64 / (GRID_KNOTS - 1) as f64).collect();
        s.knots = s.ln_knots.iter().map(|t| t.exp()).collect();
        let mut cum = Vec::with_capacity(GRID_KNOTS);
        cum.push(0.0);
        for i in 1..GRID_KNOTS {
            let m = s.tail_mass(s.ln_knots[i - 1], s.ln_knots[i]);
            cum.push(cum[i - 1] + m);
        }
        s.cum = cum;
        s.slopes = pchip_slopes(&s.cum, &s.ln_knots);
        s.remainder = s.asymptotic_remainder(xq);
        s.total = x0 + s.cum[GRID_KNOTS - 1] + s.remainder;
        Ok(s)
    }

    fn ln_rel(&self, x: f64) -> f64 {
        self.nu * x.ln() - self.sigma * x.powf(self.rho) - self.ln_g0
    }

    /// Approximate tail mass beyond `x`, `g(x) x^(1-rho) / (sigma rho)`, relative to `g(x0)`.
    fn asymptotic_remainder(&self, x: f64) -> f64 {
        (self.ln_rel(x) + (1.0 - self.rho) * x.ln() - (self.sigma * self.rho).ln()).exp()
    }

    /// Point beyond which the tail mass is below `TAIL_EPS` of the bulk mass.
    fn quantile_bound(&self) -> f64 {
        let target = TAIL_EPS.ln() + self.x0.ln();
        let f = |t: f64| {
            let x = t.exp();
            self.ln_rel(x) + (1.0 - self.rho) * t - (self.sigma * self.rho).ln() - target
        };
        let mut lo = self.x0.ln();
        let mut hi = lo + 1.0;
        while f(hi) > 0.0 {
            lo = hi;
            hi += (hi - self.x0.ln()).max(1.0);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.exp().max(self.x0 * (1.0 + 1e-9))
    }

    /// `∫ g/g(x0)` between `exp(ta)` and `exp(tb)`, integrating in `t = ln x`.
    fn tail_mass(&self, ta: f64, tb: f64) -> f64 {
        let half = 0.5 * (tb - ta);
        let mid = 0.5 * (tb + ta);
        let mut acc = 0.0;
        for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for t in [mid - half * node, mid + half * node] {
                acc += w * (self.ln_rel(t.exp()) + t).exp();
            }
        }
        acc * half
    }

    fn invert(&self, m: f64) -> f64 {
        let last = GRID_KNOTS - 1;
        if m >= self.cum[last] {
            let excess = ((m - self.cum[last]) / self.remainder).min(1.0 - 1e-16);
            let xq = self.knots[last];
            return (xq.powf(self.rho) - (1.0 - excess).ln() / self.sigma).powf(1.0 / self.rho);
        }
        let i = self.cum.partition_point(|&c| c <= m).clamp(1, last) - 1;
        let (lo, hi) = (self.knots[i], self.knots[i + 1]);
        let mut x = pchip_eval(&self.cum, &self.ln_knots, &self.slopes, i, m).exp().clamp(lo, hi);
        let want = m - self.cum[i];
        let ln_lo = lo.ln();
        for _ in 0..60 {
            let phi = self.tail_mass(ln_lo, x.ln()) - want;
            let dens = self.ln_rel(x).exp();
            if dens <= 0.0 {
                break;
            }
            let next = (x - phi / dens).clamp(lo, hi);
            let done = (next - x).abs() <= INVERT_TOL * x;
            x = next;
            if done {
                break;
            }
        }
        x
    }

    pub fn draw_magnitude(&self, rng: &mut RngStream) -> f64 {
        self.quantile_magnitude(rng.uniform())
    }

    /// Inverse of [`SplicedTail::cdf_magnitude`].
    pub fn quantile_magnitude(&self, p: f64) -> f64 {
        let m = p * self.total;
        if m < self.x0 {
            m
        } else {
            self.invert(m - self.x0)
        }
    }

    pub fn cdf_magnitude(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x < self.x0 {
            return x / self.total;
        }
        let tail = if x >= self.knots[GRID_KNOTS - 1] {
            self.cum[GRID_KNOTS - 1] + self.remainder - self.asymptotic_remainder(x)
        } else {
            let i = self.knots.partition_point(|&k| k <= x).clamp(1, GRID_KNOTS - 1) - 1;
            self.cum[i] + self.tail_mass(self.ln_knots[i], x.ln())
        };
        (self.x0 + tail) / self.total
    }

    pub fn logpdf(&self, x: f64) -> f64 {
        let ax = x.abs();
        let rel = if ax < self.x0 { 0.0 } else { self.ln_rel(ax) };
        rel - (2.0 * self.total).ln()
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn grid_end(&self) -> f64 {
        self.knots[GRID_KNOTS - 1]
    }
}

/// Fritsch–Carlson derivatives for a monotone cubic through `(xs, ys)`.
fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let secant: Vec<f64> = (0..n - 1)
        .map(|i| {
            let h = xs[i + 1] - xs[i];
            if h > 0.0 {
                (ys[i + 1] - ys[i]) / h
            } else {
                0.0
            }
        })
        .collect();
    let mut d = vec![0.0; n];
    d[0] = secant[0];
    d[n - 1] = secant[n - 2];
    for i in 1..n - 1 {
        let (a, b) = (secant[i - 1], secant[i]);
        if a * b > 0.0 {
            let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
            d[i] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d
}

fn pchip_eval(xs: &[f64], ys: &[f64], d: &[f64], i: usize, x: f64) -> f64 {
    let h = xs[i + 1] - xs[i];
    if h <= 0.0 {
        return ys[i];
    }
    let t = (x - xs[i]) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[i] + h10 * h * d[i] + h01 * ys[i + 1] + h11 * h * d[i + 1]
}
