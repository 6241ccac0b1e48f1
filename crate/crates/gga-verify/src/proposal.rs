//! Importance-sampling proposals built from representatives.

use gga_core::{representative, AtomicDistribution, RepresentativeConfig64, RepresentativeSampler, RngStream, TailClass64};

use crate::error::VerifyError;

/// Draws used to match a proposal's scale to its target.
pub const CALIBRATION_DRAWS: usize = 100_000;

#[derive(Clone, Debug)]
pub enum Proposal {
    /// A representative stretched by `scale`, folded onto `[0, ∞)` when the
    /// target has nonnegative support.
    Representative { sampler: RepresentativeSampler, scale: f64, fold: bool },
    Normal { loc: f64, scale: f64 },
}

impl Proposal {
    pub fn draw(&self, rng: &mut RngStream) -> Result<f64, VerifyError> {
        Ok(match self {
            Proposal::Representative { sampler, scale, fold } => {
                let x = scale * sampler.draw(rng)?;
                if *fold {
                    x.abs()
                } else {
                    x
                }
            }
            Proposal::Normal { loc, scale } => loc + scale * rng.normal(),
        })
    }

    pub fn logpdf(&self, x: f64) -> f64 {
        match self {
            Proposal::Representative { sampler, scale, fold } => {
                if *fold {
                    if x < 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    std::f64::consts::LN_2 + sampler.logpdf(x / scale) - scale.ln()
                } else {
                    sampler.logpdf(x / scale) - scale.ln()
                }
            }
            Proposal::Normal { loc, scale } => {
                let z = (x - loc) / scale;
                -0.5 * z * z - scale.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
        }
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    sorted[((q * sorted.len() as f64) as usize).min(sorted.len() - 1)]
}

fn sorted_draws(mut f: impl FnMut(&mut RngStream) -> Result<f64, VerifyError>, seed: u64, stream: u64) -> Result<Vec<f64>, VerifyError> {
    let mut rng = RngStream::new(seed, stream);
    let mut v = (0..CALIBRATION_DRAWS).map(|_| f(&mut rng)).collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// The representative of `class`, scaled so the median of `|x|` matches
/// the target's.
pub fn representative_proposal(
    class: &TailClass64,
    target: &AtomicDistribution,
    cfg: &RepresentativeConfig64,
    seed: u64,
) -> Result<Proposal, VerifyError> {
    let sampler = RepresentativeSampler::new(&representative(class, cfg)?)?;
    let fold = target.family.nonnegative_support();
    let t = sorted_draws(|r| Ok(target.draw(r)?.abs()), seed, 0)?;
    let p = sorted_draws(|r| Ok(sampler.draw(r)?.abs()), seed, 1)?;
    let scale = quantile(&t, 0.5) / quantile(&p, 0.5);
    Ok(Proposal::Representative { sampler, scale, fold })
}

/// A normal matched to the target's median and interquartile range.
pub fn normal_proposal(target: &AtomicDistribution, seed: u64) -> Result<Proposal, VerifyError> {
    let t = sorted_draws(|r| Ok(target.draw(r)?), seed, 0)?;
    let iqr = quantile(&t, 0.75) - quantile(&t, 0.25);
    Ok(Proposal::Normal { loc: quantile(&t, 0.5), scale: iqr / 1.348_979_500_392_163_5 })
}

/// `ln p(x) - ln q(x)` at `n` draws from the proposal.
pub fn importance_log_ratios(target: &AtomicDistribution, proposal: &Proposal, n: usize, seed: u64) -> Result<Vec<f64>, VerifyError> {
    let mut rng = RngStream::new(seed, 2);
    (0..n)
        .map(|_| {
            let x = proposal.draw(&mut rng)?;
            Ok(target.logpdf(x)? - proposal.logpdf(x))
        })
        .collect()
}
