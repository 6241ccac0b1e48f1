//! Single-coordinate SGD on a least-squares loss,
//! `b <- (1 - delta X^2) b + delta Y X` with `X ~ N(0, sigma_x^2)` and
//! `Y ~ N(0, 1)`, whose stationary law has a power-law tail.

use std::f64::consts::PI;
use std::fmt::Write;

use gga_core::{Algebra64, AtomicDistribution, Family, RngStream, TailClass64};

use crate::error::VerifyError;
use crate::quad::tanh_sinh;

const ALPHA_MAX: f64 = 64.0;
const QUAD_TOL: f64 = 1e-13;

fn half_normal_log_density(z: f64) -> f64 {
    0.5 * (2.0 / PI).ln() - 0.5 * z * z
}

/// `E g(|1 - delta X^2|)` for `g` given on the log scale of its argument,
/// splitting the normal integral where the factor vanishes.
fn kesten_expectation(delta: f64, sigma_x: f64, g: impl Fn(f64) -> f64) -> f64 {
    let c = delta * sigma_x * sigma_x;
    let z0 = 1.0 / c.sqrt();
    let inner = tanh_sinh(0.0, z0, QUAD_TOL, |z, _, db| {
        let lm = (c * db * (z0 + z)).ln();
        g(lm) * half_normal_log_density(z).exp()
    });
    let mid = tanh_sinh(z0, 2.0 * z0, QUAD_TOL, |z, da, _| {
        let lm = (c * da * (z + z0)).ln();
        g(lm) * half_normal_log_density(z).exp()
    });
    let far = tanh_sinh(2.0 * z0, (2.0 * z0).max(60.0), QUAD_TOL, |z, _, _| {
        let lm = (c * z * z - 1.0).ln();
        g(lm) * half_normal_log_density(z).exp()
    });
    inner + mid + far
}

/// `E |1 - delta X^2|^alpha`.
pub fn kesten_moment(delta: f64, sigma_x: f64, alpha: f64) -> f64 {
    kesten_expectation(delta, sigma_x, |lm| (alpha * lm).exp())
}

/// `E ln |1 - delta X^2|`; negative when the recursion is stationary.
pub fn kesten_log_moment(delta: f64, sigma_x: f64) -> f64 {
    kesten_expectation(delta, sigma_x, |lm| lm)
}

/// Positive root of `E |1 - delta X^2|^alpha = 1`, the survival exponent of
/// the stationary law.
pub fn sgd_alpha_oracle(delta: f64, sigma_x: f64) -> Result<f64, VerifyError> {
    if !(delta > 0.0 && sigma_x > 0.0) || kesten_log_moment(delta, sigma_x) >= 0.0 {
        return Err(VerifyError::NoRoot(ALPHA_MAX));
    }
    let f = |a: f64| kesten_moment(delta, sigma_x, a) - 1.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > ALPHA_MAX {
            return Err(VerifyError::NoRoot(ALPHA_MAX));
        }
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Class of the iterate after `steps` updates from zero, built with the same
/// operations the analyzer applies to [`sgd_program`].
pub fn sgd_class(delta: f64, sigma_x: f64, steps: usize) -> Result<TailClass64, VerifyError> {
    let alg = Algebra64::default();
    let x = AtomicDistribution::new(Family::Normal, vec![0.0, sigma_x])?.class_of::<f64>()?;
    let y = AtomicDistribution::new(Family::Normal, vec![0.0, 1.0])?.class_of::<f64>()?;
    let contraction = alg.translate(alg.scalar_mul(delta, alg.power(x, 2.0)?)?, 1.0);
    let noise = alg.multiply(alg.scalar_mul(delta, y)?, x);
    let mut b = noise;
    for _ in 1..steps {
        b = alg.add(alg.multiply(contraction, b), noise);
    }
    Ok(b)
}

/// The recursion unrolled as a model with fresh `X`, `Y` per step; the last
/// iterate is queried.
pub fn sgd_program(delta: f64, sigma_x: f64, steps: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# delta={delta} sigma_x={sigma_x} steps={steps}");
    let _ = writeln!(s, "model sgd {{");
    for k in 1..=steps {
        let _ = writeln!(s, "x{k} ~ Normal(0, {sigma_x})");
        let _ = writeln!(s, "y{k} ~ Normal(0, 1)");
        if k == 1 {
            let _ = writeln!(s, "b1 = {delta} * y1 * x1");
        } else {
            let _ = writeln!(s, "b{k} = (1 - {delta} * x{k}^2) * b{} + {delta} * y{k} * x{k}", k - 1);
        }
    }
    let _ = writeln!(s, "query b{steps}");
    s.push_str("}\n");
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgdRun {
    pub chains: usize,
    pub burn_in: usize,
    pub per_chain: usize,
    pub thin: usize,
}

impl SgdRun {
    pub fn total(&self) -> usize {
        self.chains * self.per_chain
    }
}

/// Runs independent chains from zero; chain `j` uses stream `j` of `seed`.
/// Each chain contributes `per_chain` iterates spaced `thin` steps apart
/// after `burn_in` steps.
pub fn sgd_simulate(delta: f64, sigma_x: f64, run: SgdRun, seed: u64) -> Vec<f64> {
    let chain = |j: usize, out: &mut [f64]| {
        let mut rng = RngStream::new(seed, j as u64);
        let mut b = 0.0;
        let step = |b: &mut f64, rng: &mut RngStream| {
            let x = sigma_x * rng.normal();
            let y = rng.normal();
            *b = (1.0 - delta * x * x) * *b + delta * y * x;
        };
        for _ in 0..run.burn_in {
            step(&mut b, &mut rng);
        }
        for slot in out.iter_mut() {
            for _ in 0..run.thin.max(1) {
                step(&mut b, &mut rng);
            }
            *slot = b;
        }
    };
    let mut out = vec![0.0; run.total()];
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(run.chains.max(1));
    if threads <= 1 || run.per_chain == 0 {
        for (j, block) in out.chunks_mut(run.per_chain.max(1)).enumerate() {
            chain(j, block);
        }
        return out;
    }
    let per_thread = run.chains.div_ceil(threads);
    std::thread::scope(|s| {
        for (t, part) in out.chunks_mut(per_thread * run.per_chain).enumerate() {
            let chain = &chain;
            s.spawn(move || {
                for (i, block) in part.chunks_mut(run.per_chain).enumerate() {
                    chain(t * per_thread + i, block);
                }
            });
        }
    });
    out
}
