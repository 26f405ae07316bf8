//! Monte Carlo plumbing: estimates with standard errors, compensated
//! summation, a worker-count-independent chunked runner, and a two-sample
//! Kolmogorov-Smirnov statistic.

use crate::rng::{derive_seed, seeded_rng, Rng};
use rayon::prelude::*;

/// A Monte Carlo estimate: sample mean, standard error of the mean, and the
/// number of samples behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: u64,
}

impl McEstimate {
    /// Absolute half-width of the k-sigma band around the mean.
    pub fn band(&self, k: f64) -> f64 {
        k * self.se
    }
}

/// Neumaier compensated accumulator. Exact enough that reduction-order
/// differences at the chunk level stay far below estimator noise.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Running mean and squared-deviation accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Merge another accumulator into this one. Merge order is fixed by the
    /// caller, so results are scheduling-independent.
    fn merge(&mut self, other: Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    fn estimate(&self) -> McEstimate {
        let se = if self.n > 1 {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            f64::INFINITY
        };
        McEstimate { mean: self.mean, se, n: self.n }
    }
}

/// Samples per chunk. Fixed so that chunk boundaries, and therefore every
/// drawn sample, are identical for any worker count.
const CHUNK: u64 = 8192;

/// Run `n` draws of `f` and return mean/SE. Work is split into fixed-size
/// chunks; chunk `i` draws from the stream `derive_seed(base_seed, i)`, chunk
/// results are merged in index order. The worker count affects scheduling
/// only, never the estimate.
pub fn run_chunked<F>(n: u64, base_seed: u64, workers: usize, f: F) -> McEstimate
where
    F: Fn(&mut Rng) -> f64 + Sync,
{
    assert!(n > 0, "sample count must be positive");
    let chunks = n.div_ceil(CHUNK);
    let run_chunk = |i: u64| {
        let mut rng = seeded_rng(derive_seed(base_seed, i));
        let lo = i * CHUNK;
        let hi = (lo + CHUNK).min(n);
        let mut acc = Welford::default();
        for _ in lo..hi {
            acc.push(f(&mut rng));
        }
        acc
    };
    let parts: Vec<Welford> = if workers <= 1 {
        (0..chunks).map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect())
    };
    let mut total = Welford::default();
    for part in parts {
        total.merge(part);
    }
    total.estimate()
}

/// Mean/SE of an explicit sample.
pub fn estimate_from_samples(samples: &[f64]) -> McEstimate {
    let mut acc = Welford::default();
    for &x in samples {
        acc.push(x);
    }
    acc.estimate()
}

/// Two-sample Kolmogorov-Smirnov statistic, sup_x |F_a(x) - F_b(x)|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs nonempty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
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

/// Asymptotic two-sample KS rejection threshold at level `alpha`:
/// c(alpha) * sqrt((n + m) / (n * m)) with c(alpha) = sqrt(-ln(alpha/2) / 2).
pub fn ks_threshold(n: usize, m: usize, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0, "level must be in (0,1)");
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
