use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Generator for substream `index` of `seed`: the same key with a distinct
/// ChaCha stream id, so substreams never overlap and need no shared state.
pub(crate) fn substream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Splits `total` work items over `parts` substreams, runs them in parallel
/// and returns the per-substream results in substream order.
pub(crate) fn run_substreams<T, F>(seed: u64, total: usize, parts: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    let parts = parts.max(1);
    let base = total / parts;
    let extra = total % parts;
    (0..parts)
        .into_par_iter()
        .map(|i| {
            let count = base + usize::from(i < extra);
            let mut rng = substream_rng(seed, i as u64);
            work(count, &mut rng)
        })
        .collect()
}

/// Streaming mean/variance (Welford) with an order-sensitive merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct MeanAccumulator {
    pub count: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let var = self.m2 / (self.count - 1) as f64;
        (var.max(0.0) / self.count as f64).sqrt()
    }

    /// Treats the accumulated values as covering `total` draws, the rest
    /// being zeros. Used for indicator-weighted estimators.
    pub fn padded_to(&self, total: u64) -> MeanAccumulator {
        let mut out = *self;
        if total > self.count {
            let zeros = MeanAccumulator { count: total - self.count, mean: 0.0, m2: 0.0 };
            out.merge(&zeros);
        }
        out
    }
}
