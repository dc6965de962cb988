//! Seeded, chunked Monte Carlo.
//!
//! Samples are drawn in fixed-size chunks. Chunk `i` of a stream owns its own
//! ChaCha generator, keyed by `(seed, substream)` and positioned on stream
//! `i`, so the samples are fixed by the seed alone. Chunks run on the rayon
//! pool and their moments are merged in chunk order, which makes every
//! estimate bit-identical for any number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per chunk.
pub const CHUNK: usize = 4096;

pub type SampleRng = ChaCha8Rng;

/// A seed plus a substream index. Equal states give equal sample sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub substream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self { seed, substream: 0 }
    }

    pub fn with_substream(self, substream: u64) -> Self {
        Self { substream, ..self }
    }

    /// An unrelated state named by `label`, for independent estimators.
    pub fn derive(&self, label: &str) -> Self {
        Self {
            seed: self.seed,
            substream: splitmix64(self.substream ^ fnv1a(label)),
        }
    }

    /// Generator for chunk `chunk` of this stream.
    pub fn chunk_rng(&self, chunk: u64) -> SampleRng {
        let mut key = [0u8; 32];
        let a = splitmix64(self.seed);
        let b = splitmix64(a ^ self.substream);
        let c = splitmix64(b.rotate_left(17));
        let d = splitmix64(c ^ 0x5851_F42D_4C95_7F2D);
        for (i, w) in [a, b, c, d].iter().enumerate() {
            key[8 * i..8 * i + 8].copy_from_slice(&w.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(chunk);
        rng
    }

    /// Generator for sequential (unchunked) use.
    pub fn rng(&self) -> SampleRng {
        self.chunk_rng(0)
    }
}

/// Value, standard error, sample count and seed of one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// A deterministic value (quadrature or closed form).
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: 0.0,
            n_samples: 0,
            seed: 0,
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            stderr: self.stderr * c.abs(),
            ..self
        }
    }

    pub fn relative_stderr(&self) -> f64 {
        if self.value == 0.0 {
            if self.stderr == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.stderr / self.value.abs()
        }
    }
}

/// Relative tolerance used when two compared values carry no sampling error.
pub const EXACT_RTOL: f64 = 1e-10;

/// Standardized difference of two independent estimates. When both are
/// exact, returns 0 for values equal within [`EXACT_RTOL`] and infinity
/// otherwise.
pub fn z_score(a: &MonteCarloEstimate, b: &MonteCarloEstimate) -> f64 {
    let se = a.stderr.hypot(b.stderr);
    let diff = a.value - b.value;
    if se > 0.0 {
        return diff / se;
    }
    let scale = a.value.abs().max(b.value.abs()).max(f64::MIN_POSITIVE);
    if diff.abs() <= EXACT_RTOL * scale {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.n as f64 * w;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self, seed: u64) -> MonteCarloEstimate {
        let stderr = if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        };
        MonteCarloEstimate {
            value: self.mean,
            stderr,
            n_samples: self.n,
            seed,
        }
    }
}

fn chunk_sizes(n: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(move |i| (i as u64, CHUNK.min(n - i * CHUNK)))
}

/// Mean of `n` i.i.d. draws of `sample`.
pub fn estimate<F>(n: usize, rng: &RngState, sample: F) -> MonteCarloEstimate
where
    F: Fn(&mut SampleRng) -> f64 + Sync,
{
    let parts: Vec<Moments> = chunk_sizes(n)
        .map(|(chunk, len)| {
            let mut r = rng.chunk_rng(chunk);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(sample(&mut r));
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for p in &parts {
        total.merge(p);
    }
    total.estimate(rng.seed)
}

/// Componentwise means of `n` draws of a vector of length `width`.
pub fn estimate_vec<F>(n: usize, width: usize, rng: &RngState, sample: F) -> Vec<MonteCarloEstimate>
where
    F: Fn(&mut SampleRng, &mut [f64]) + Sync,
{
    let parts: Vec<Vec<Moments>> = chunk_sizes(n)
        .map(|(chunk, len)| {
            let mut r = rng.chunk_rng(chunk);
            let mut m = vec![Moments::default(); width];
            let mut buf = vec![0.0; width];
            for _ in 0..len {
                sample(&mut r, &mut buf);
                for (mi, &x) in m.iter_mut().zip(&buf) {
                    mi.push(x);
                }
            }
            m
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for p in &parts {
        for (t, m) in total.iter_mut().zip(p) {
            t.merge(m);
        }
    }
    total.iter().map(|m| m.estimate(rng.seed)).collect()
}

/// Draws `n` values in a reproducible order (for distribution tests).
pub fn draw<T, F>(n: usize, rng: &RngState, sample: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SampleRng) -> T + Sync,
{
    let parts: Vec<Vec<T>> = chunk_sizes(n)
        .map(|(chunk, len)| {
            let mut r = rng.chunk_rng(chunk);
            (0..len).map(|_| sample(&mut r)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value of the two-sample KS statistic at the 1% level.
pub fn ks_critical_1pct(na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    1.628 * ((na + nb) / (na * nb)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn uniform_mean() {
        let e = estimate(100_000, &RngState::new(1), |r| r.random::<f64>());
        assert!((e.value - 0.5).abs() < 3.0 * e.stderr + 1e-12);
        let expected_se = (1.0f64 / 12.0 / 1e5).sqrt();
        assert!((e.stderr / expected_se - 1.0).abs() < 0.02);
        assert_eq!(e.n_samples, 100_000);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate(50_000, &RngState::new(9), |r| r.random::<f64>().powi(3)))
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn substreams_differ() {
        let s = RngState::new(3);
        let a = estimate(1000, &s.derive("a"), |r| r.random::<f64>());
        let b = estimate(1000, &s.derive("b"), |r| r.random::<f64>());
        assert_ne!(a.value, b.value);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = Moments::default();
        let mut right = Moments::default();
        xs[..313].iter().for_each(|&x| left.push(x));
        xs[313..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert!((left.mean - whole.mean).abs() < 1e-12);
        assert!((left.m2 / whole.m2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_score_of_exact_values() {
        let a = MonteCarloEstimate::exact(1.0);
        assert_eq!(z_score(&a, &MonteCarloEstimate::exact(1.0 + 1e-14)), 0.0);
        assert!(z_score(&a, &MonteCarloEstimate::exact(1.1)).is_infinite());
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
        assert!(ks_statistic(&a, &b) > ks_critical_1pct(1000, 1000));
        assert!(ks_statistic(&a, &a) < 1e-12);
    }
}
