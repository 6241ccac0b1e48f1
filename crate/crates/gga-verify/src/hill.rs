use serde::{Deserialize, Serialize};

use crate::error::VerifyError;
use crate::khat::gpd_fit;

pub const MIN_TAIL: usize = 20;

/// Tail exponent estimate in the density convention, so a Cauchy sample
/// gives about 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub alpha_hat: f64,
    /// Shape of a generalized Pareto fitted to the same exceedances.
    pub k_hat: f64,
    pub n_tail: usize,
    pub stderr: f64,
}

/// Magnitudes of the finite, nonzero entries, largest first, truncated to
/// the `keep` largest.
fn top_magnitudes(samples: &[f64], keep: usize) -> Result<Vec<f64>, VerifyError> {
    let mut mags = Vec::with_capacity(samples.len());
    for &x in samples {
        if !x.is_finite() {
            return Err(VerifyError::NonFinite);
        }
        if x != 0.0 {
            mags.push(x.abs());
        }
    }
    let desc = |a: &f64, b: &f64| b.total_cmp(a);
    if keep < mags.len() {
        mags.select_nth_unstable_by(keep, desc);
        mags.truncate(keep + 1);
    }
    mags.sort_unstable_by(desc);
    Ok(mags)
}

/// Hill estimator on the `floor(tail_fraction * n)` largest magnitudes.
pub fn hill_alpha(samples: &[f64], tail_fraction: f64) -> Result<TailEstimate, VerifyError> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(VerifyError::BadTailFraction(tail_fraction));
    }
    let k = (tail_fraction * samples.len() as f64).floor() as usize;
    let top = top_magnitudes(samples, k)?;
    if k < MIN_TAIL || top.len() <= k {
        return Err(VerifyError::TooFewExceedances { need: MIN_TAIL, have: k.min(top.len().saturating_sub(1)) });
    }
    let u = top[k];
    let xi = top[..k].iter().map(|x| (x / u).ln()).sum::<f64>() / k as f64;
    let mut exceed: Vec<f64> = top[..k].iter().map(|x| x - u).collect();
    exceed.reverse();
    let k_hat = if exceed[k - 1] > 0.0 { gpd_fit(&exceed).0 } else { 0.0 };
    Ok(TailEstimate {
        alpha_hat: 1.0 / xi + 1.0,
        k_hat,
        n_tail: k,
        stderr: 1.0 / (xi * (k as f64).sqrt()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerVerdict {
    PowerLaw,
    NonPower,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawCheck {
    pub coarse: TailEstimate,
    pub fine: Option<TailEstimate>,
    pub verdict: PowerVerdict,
}

/// Estimates above this are read as "no power law in reach".
pub const ALPHA_CEILING: f64 = 10.0;

/// Compares Hill estimates at `tail_fraction` and a tenth of it. A power
/// law gives the same answer at both depths; lighter tails keep steepening.
pub fn power_law_check(samples: &[f64], tail_fraction: f64) -> Result<PowerLawCheck, VerifyError> {
    let coarse = hill_alpha(samples, tail_fraction)?;
    let fine = hill_alpha(samples, tail_fraction / 10.0).ok();
    let verdict = match fine {
        None => PowerVerdict::Inconclusive,
        Some(f) if coarse.alpha_hat > ALPHA_CEILING || f.alpha_hat > ALPHA_CEILING => PowerVerdict::NonPower,
        Some(f) if (f.alpha_hat - coarse.alpha_hat).abs() > 0.3f64.max(3.0 * f.stderr) => PowerVerdict::NonPower,
        Some(_) => PowerVerdict::PowerLaw,
    };
    Ok(PowerLawCheck { coarse, fine, verdict })
}
