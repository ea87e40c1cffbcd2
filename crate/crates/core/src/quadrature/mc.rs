use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Estimate, McSettings};

pub type McRng = ChaCha8Rng;

const CHUNK: u64 = 8192;

/// Generator for one chunk of a seeded run: same seed, distinct stream.
pub fn seeded_rng(seed: u64, stream: u64) -> McRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy)]
struct Moments {
    n: u64,
    mean: Complex64,
    m2: f64,
}

impl Moments {
    fn empty() -> Self {
        Moments {
            n: 0,
            mean: Complex64::new(0.0, 0.0),
            m2: 0.0,
        }
    }

    fn push(&mut self, x: Complex64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        let delta2 = x - self.mean;
        self.m2 += delta.re * delta2.re + delta.im * delta2.im;
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta.norm_sqr() * self.n as f64 * w,
        }
    }
}

/// Sample mean of `draw` over `samples` independent draws with its standard
/// error. Chunks run in parallel, each on its own ChaCha stream, and are merged
/// in chunk order, so the result does not depend on the thread count.
pub fn mc_estimate<D>(samples: u64, seed: u64, draw: D) -> Estimate
where
    D: Fn(&mut McRng) -> Complex64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded_rng(seed, c);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut m = Moments::empty();
            for _ in 0..len {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    let total = partial.into_iter().fold(Moments::empty(), Moments::merge);
    let err = if total.n > 1 {
        (total.m2 / (total.n - 1) as f64 / total.n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Estimate {
        value: total.mean,
        err,
        evals: total.n,
        converged: true,
    }
}

/// Plain Monte Carlo over a box with uniform sampling.
pub fn integrate_mc<F>(f: F, lower: &[f64], upper: &[f64], settings: &McSettings) -> Estimate
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let volume: f64 = lower.iter().zip(upper).map(|(a, b)| b - a).product();
    let est = mc_estimate(settings.samples, settings.seed, |rng| {
        let p: Vec<f64> = lower
            .iter()
            .zip(upper)
            .map(|(a, b)| a + (b - a) * rng.random::<f64>())
            .collect();
        f(&p)
    });
    est.scale(Complex64::new(volume, 0.0))
}
