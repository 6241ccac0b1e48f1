use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// A reproducible generator identified by `(seed, stream)`.
///
/// Distinct stream indices under one seed give independent sequences, so
/// parallel work can be split by index without changing results.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
    rejected: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng, rejected: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Another stream under the same seed.
    pub fn fork(&self, stream: u64) -> Self {
        RngStream::new(self.seed, stream)
    }

    /// Number of non-finite draws discarded so far.
    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    pub(crate) fn note_rejection(&mut self) {
        self.rejected += 1;
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `(0, 1]`, safe to take logarithms of.
    pub fn uniform_pos(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn sign(&mut self) -> f64 {
        if self.rng.next_u32() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream: u64,
    pub index: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub value: f64,
    pub provenance: Provenance,
}

pub const MAX_RETRIES: u32 = 100;

/// Draws until the result is finite, giving up after [`MAX_RETRIES`] attempts.
pub(crate) fn finite_draw(rng: &mut RngStream, mut draw: impl FnMut(&mut RngStream) -> f64) -> Option<f64> {
    for _ in 0..=MAX_RETRIES {
        let x = draw(rng);
        if x.is_finite() {
            return Some(x);
        }
        rng.note_rejection();
    }
    None
}

/// `ln G` for `G ~ Gamma(shape, 1)`.
///
/// Marsaglia–Tsang squeeze/rejection; shapes below one use
/// `G(a) = G(a + 1) U^(1/a)`, kept in log space so tiny shapes do not underflow.
pub fn ln_gamma_variate(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        return ln_gamma_variate(shape + 1.0, rng) + rng.uniform_pos().ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = rng.normal();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.uniform_pos();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

pub fn gamma_variate(shape: f64, rate: f64, rng: &mut RngStream) -> f64 {
    (ln_gamma_variate(shape, rng) - rate.ln()).exp()
}
