//! Generalized Pareto shape of the largest importance ratios.

use serde::{Deserialize, Serialize};

use crate::error::VerifyError;

/// At or below this the proposal is usable.
pub const KHAT_PASS: f64 = 0.2;
/// Above this importance sampling is unreliable.
pub const KHAT_FAIL: f64 = 0.7;

const PRIOR_K: f64 = 10.0;
const PRIOR_BS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KhatVerdict {
    Pass,
    Marginal,
    Fail,
}

pub fn khat_verdict(k: f64) -> KhatVerdict {
    if k <= KHAT_PASS {
        KhatVerdict::Pass
    } else if k <= KHAT_FAIL {
        KhatVerdict::Marginal
    } else {
        KhatVerdict::Fail
    }
}

/// Zhang and Stephens' empirical Bayes fit of a generalized Pareto to
/// positive exceedances sorted ascending, with the shape shrunk towards 1/2
/// by a weak prior. Returns `(shape, scale)`.
pub fn gpd_fit(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let nf = n as f64;
    let m = 30 + (nf.sqrt() as usize);
    let quartile = x[((nf / 4.0 + 0.5) as usize).max(1) - 1];
    let xmax = x[n - 1];
    let b: Vec<f64> = (1..=m)
        .map(|j| (1.0 - (m as f64 / (j as f64 - 0.5)).sqrt()) / (PRIOR_BS * quartile) + 1.0 / xmax)
        .collect();
    let kb = |b: f64| x.iter().map(|&v| (-b * v).ln_1p()).sum::<f64>() / nf;
    let ll: Vec<f64> = b.iter().map(|&bj| {
        let k = kb(bj);
        nf * ((-bj / k).ln() - k - 1.0)
    }).collect();
    let mut w: Vec<f64> = ll
        .iter()
        .map(|&li| 1.0 / ll.iter().map(|&lj| (lj - li).exp()).sum::<f64>())
        .collect();
    for wi in w.iter_mut() {
        if !(*wi >= 10.0 * f64::EPSILON) {
            *wi = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    let b_post = b.iter().zip(&w).map(|(bj, wj)| bj * wj).sum::<f64>() / total;
    let k = kb(b_post);
    let sigma = -k / b_post;
    ((nf * k + PRIOR_K * 0.5) / (nf + PRIOR_K), sigma)
}

/// Shape of a generalized Pareto fitted to the `min(0.2 n, 3 sqrt n)`
/// largest importance ratios, given on the log scale. Returns negative
/// infinity when the ratios are all equal.
pub fn pareto_khat(log_ratios: &[f64]) -> Result<f64, VerifyError> {
    if log_ratios.iter().any(|v| !v.is_finite()) {
        return Err(VerifyError::NonFinite);
    }
    let n = log_ratios.len();
    if n < 2 {
        return Err(VerifyError::EmptySample);
    }
    let m = (0.2 * n as f64).min(3.0 * (n as f64).sqrt()).ceil() as usize;
    let mut lw = log_ratios.to_vec();
    lw.sort_unstable_by(f64::total_cmp);
    let top = lw[n - 1];
    if lw[0] == top {
        return Ok(f64::NEG_INFINITY);
    }
    let cutoff = (lw[n.saturating_sub(m + 1)] - top).max(f64::MIN_POSITIVE.ln());
    let tail: Vec<f64> = lw.iter().map(|v| v - top).filter(|&v| v > cutoff).map(|v| v.exp() - cutoff.exp()).collect();
    if tail.len() <= 4 {
        return Ok(f64::INFINITY);
    }
    Ok(gpd_fit(&tail).0)
}
