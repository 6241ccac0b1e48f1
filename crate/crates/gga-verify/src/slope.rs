//! Histogram estimates of the log-density in a tail band.

use serde::{Deserialize, Serialize};

use crate::error::VerifyError;

pub const BINS: usize = 40;
pub const MIN_BINS: usize = 30;
pub const MIN_COUNT: usize = 5;

/// One log-spaced bin: geometric centre, log of the empirical density, count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub x: f64,
    pub log_density: f64,
    pub count: usize,
}

/// Empirical density of `|x|` on `BINS` log-spaced bins between the
/// `q_lo` and `q_hi` quantiles, keeping bins with at least `MIN_COUNT` hits.
pub fn tail_density(samples: &[f64], q_lo: f64, q_hi: f64) -> Result<Vec<DensityPoint>, VerifyError> {
    if !(0.0 < q_lo && q_lo < q_hi && q_hi < 1.0) {
        return Err(VerifyError::BadTailFraction(q_lo));
    }
    let mut mags: Vec<f64> = Vec::with_capacity(samples.len());
    for &x in samples {
        if !x.is_finite() {
            return Err(VerifyError::NonFinite);
        }
        mags.push(x.abs());
    }
    let n = mags.len();
    if n == 0 {
        return Err(VerifyError::EmptySample);
    }
    mags.sort_unstable_by(f64::total_cmp);
    let at = |q: f64| mags[((q * n as f64) as usize).min(n - 1)];
    let (lo, hi) = (at(q_lo), at(q_hi));
    if !(lo > 0.0 && hi > lo) {
        return Err(VerifyError::InsufficientTailMass { bins: 0, need: MIN_BINS });
    }
    let step = (hi / lo).ln() / BINS as f64;
    let start = mags.partition_point(|&v| v < lo);
    let mut counts = [0usize; BINS];
    for &v in &mags[start..] {
        if v >= hi {
            break;
        }
        let b = (((v / lo).ln() / step) as usize).min(BINS - 1);
        counts[b] += 1;
    }
    let pts: Vec<DensityPoint> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= MIN_COUNT)
        .map(|(b, &c)| {
            let a = lo * (step * b as f64).exp();
            let width = a * step.exp_m1();
            DensityPoint { x: a * (0.5 * step).exp(), log_density: (c as f64 / (n as f64 * width)).ln(), count: c }
        })
        .collect();
    if pts.len() < MIN_BINS {
        return Err(VerifyError::InsufficientTailMass { bins: pts.len(), need: MIN_BINS });
    }
    Ok(pts)
}

/// Ordinary least squares `y = a + b x`, returning `(a, b)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub bins: usize,
    /// Slopes fitted to the lower and upper halves of the band.
    pub lower_slope: f64,
    pub upper_slope: f64,
}

/// Largest relative change between the half-band slopes still read as a
/// straight line.
pub const STRAIGHTNESS: f64 = 0.2;

impl LogLogFit {
    pub fn looks_power_law(&self) -> bool {
        (self.upper_slope - self.lower_slope).abs() <= STRAIGHTNESS * self.lower_slope.abs().max(1.0)
    }
}

/// Least-squares slope of log density against log `|x|` over a quantile band.
pub fn loglog_slope(samples: &[f64], q_lo: f64, q_hi: f64) -> Result<LogLogFit, VerifyError> {
    let pts = tail_density(samples, q_lo, q_hi)?;
    let lx: Vec<f64> = pts.iter().map(|p| p.x.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.log_density).collect();
    let (intercept, slope) = least_squares(&lx, &ly);
    let h = lx.len() / 2;
    let lower_slope = least_squares(&lx[..h], &ly[..h]).1;
    let upper_slope = least_squares(&lx[h..], &ly[h..]).1;
    Ok(LogLogFit { slope, intercept, bins: pts.len(), lower_slope, upper_slope })
}

/// Regresses the log density on `nu ln x - sigma x^rho` over the band; a
/// matching generalized Gamma tail gives slope 1.
pub fn gengamma_slope(samples: &[f64], nu: f64, sigma: f64, rho: f64, q_lo: f64, q_hi: f64) -> Result<f64, VerifyError> {
    let pts = tail_density(samples, q_lo, q_hi)?;
    let gx: Vec<f64> = pts.iter().map(|p| nu * p.x.ln() - sigma * p.x.powf(rho)).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.log_density).collect();
    Ok(least_squares(&gx, &ly).1)
}
