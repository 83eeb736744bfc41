//! Seeded random streams, binary-pair sample accumulation and correlation
//! estimates.
//!
//! Every simulation in the crate draws its randomness from a [`SeededStream`].
//! A stream is identified by a root seed and a path of substream indices; the
//! generator for a stream is ChaCha8 keyed by a SHA-256 digest of that
//! identity, so deriving a substream is O(1) and never touches the parent.
//!
//! Large runs are split into fixed-size chunks by [`run_chunked`]. Chunk `i`
//! always draws from `stream.derive(i)`, and chunk results are folded in
//! index order, so results do not depend on the number of worker threads.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Generator handed to simulation kernels.
pub type StreamRng = ChaCha8Rng;

/// Number of trials per substream chunk.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// A deterministic random stream addressed by `(root_seed, path)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    root_seed: u64,
    path: Vec<u64>,
}

impl SeededStream {
    pub fn new(root_seed: u64) -> Self {
        Self {
            root_seed,
            path: Vec::new(),
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Returns the child stream whose path is this path extended by `index`.
    pub fn derive(&self, index: u64) -> Self {
        let mut path = Vec::with_capacity(self.path.len() + 1);
        path.extend_from_slice(&self.path);
        path.push(index);
        Self {
            root_seed: self.root_seed,
            path,
        }
    }

    /// Builds a fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut hasher = Sha256::new();
        hasher.update(b"contextuality/stream/v1");
        hasher.update(self.root_seed.to_le_bytes());
        hasher.update((self.path.len() as u64).to_le_bytes());
        for index in &self.path {
            hasher.update(index.to_le_bytes());
        }
        let key: [u8; 32] = hasher.finalize().into();
        ChaCha8Rng::from_seed(key)
    }
}

/// Runs `kernel` over `n` trials split into [`CHUNK_SIZE`] chunks, in
/// parallel, and returns the per-chunk results in chunk order.
///
/// The kernel receives the chunk's generator and its trial count.
pub fn run_chunked<T, F>(n: u64, stream: &SeededStream, kernel: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, u64) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let count = CHUNK_SIZE.min(n - i * CHUNK_SIZE);
            let mut rng = stream.derive(i).rng();
            kernel(&mut rng, count)
        })
        .collect()
}

/// Counts of the four outcome pairs of a two-wing ±1 experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairSampleSummary {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl PairSampleSummary {
    pub fn new(n_pp: u64, n_pm: u64, n_mp: u64, n_mm: u64) -> Self {
        Self {
            n_pp,
            n_pm,
            n_mp,
            n_mm,
        }
    }

    /// Records one outcome pair. Any non-negative value counts as `+1`.
    #[inline]
    pub fn record(&mut self, a: i8, b: i8) {
        match (a >= 0, b >= 0) {
            (true, true) => self.n_pp += 1,
            (true, false) => self.n_pm += 1,
            (false, true) => self.n_mp += 1,
            (false, false) => self.n_mm += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    /// Number of trials whose outcome product was `-1`.
    pub fn discordant(&self) -> u64 {
        self.n_pm + self.n_mp
    }

    pub fn merge(&self, other: &Self) -> Self {
        *self + *other
    }

    /// Estimate of `E(AB)` with the ±1-product standard error.
    pub fn correlation(&self) -> Result<Estimate> {
        estimate_correlation(self)
    }

    /// Relative frequency of the outcome pair `(a, b)`.
    pub fn joint_frequency(&self, a: i8, b: i8) -> Result<Estimate> {
        let hits = match (a >= 0, b >= 0) {
            (true, true) => self.n_pp,
            (true, false) => self.n_pm,
            (false, true) => self.n_mp,
            (false, false) => self.n_mm,
        };
        Estimate::from_proportion(hits, self.total())
    }
}

impl Add for PairSampleSummary {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            n_pp: self.n_pp + rhs.n_pp,
            n_pm: self.n_pm + rhs.n_pm,
            n_mp: self.n_mp + rhs.n_mp,
            n_mm: self.n_mm + rhs.n_mm,
        }
    }
}

impl AddAssign for PairSampleSummary {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sum for PairSampleSummary {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

/// A point estimate with its plug-in standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    /// Mean of ±1 products: stderr = sqrt((1 - value²) / n).
    pub fn from_pm_mean(value: f64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let stderr = ((1.0 - value * value).max(0.0) / n as f64).sqrt();
        Ok(Self { value, stderr, n })
    }

    /// Proportion `hits / n`: stderr = sqrt(p(1 - p) / n).
    pub fn from_proportion(hits: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let p = hits as f64 / n as f64;
        let stderr = ((p * (1.0 - p)).max(0.0) / n as f64).sqrt();
        Ok(Self {
            value: p,
            stderr,
            n,
        })
    }

    /// Sample mean with stderr from the unbiased sample variance.
    pub fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(Self {
            value: mean,
            stderr: (var / nf).sqrt(),
            n,
        })
    }

    /// `(value - target) / stderr`; `None` when the stderr is zero and the
    /// value differs from the target.
    pub fn z_score(&self, target: f64) -> Option<f64> {
        let diff = self.value - target;
        if self.stderr > 0.0 {
            Some(diff / self.stderr)
        } else if diff == 0.0 {
            Some(0.0)
        } else {
            None
        }
    }

    /// True when `|value - target| <= k * stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// `Ê = (n_pp + n_mm - n_pm - n_mp) / N` with the ±1-product stderr.
pub fn estimate_correlation(summary: &PairSampleSummary) -> Result<Estimate> {
    let n = summary.total();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let concordant = (summary.n_pp + summary.n_mm) as i128;
    let discordant = (summary.n_pm + summary.n_mp) as i128;
    let value = (concordant - discordant) as f64 / n as f64;
    Estimate::from_pm_mean(value, n)
}

/// Running sums over a scalar sample; folded in chunk order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningSums {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl RunningSums {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn estimate(&self) -> Result<Estimate> {
        Estimate::from_sums(self.sum, self.sum_sq, self.n)
    }
}

impl Add for RunningSums {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            n: self.n + rhs.n,
            sum: self.sum + rhs.sum,
            sum_sq: self.sum_sq + rhs.sum_sq,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn derive_extends_path() {
        let root = SeededStream::new(42);
        let child = root.derive(0);
        assert_eq!(child.root_seed(), 42);
        assert_eq!(child.path(), &[0]);
        assert_eq!(child.derive(3).path(), &[0, 3]);
        assert!(root.path().is_empty());
    }

    #[test]
    fn same_stream_same_sequence() {
        let s = SeededStream::new(42);
        let a: Vec<u64> = {
            let mut r = s.derive(7).rng();
            (0..32).map(|_| r.random()).collect()
        };
        let b: Vec<u64> = {
            let mut r = s.derive(7).rng();
            (0..32).map(|_| r.random()).collect()
        };
        assert_eq!(a, b);
        let mut other = s.derive(8).rng();
        let c: Vec<u64> = (0..32).map(|_| other.random()).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn path_is_not_ambiguous() {
        // [1] under seed 0 versus [] with a different seed, and [0, 1] versus [1, 0]
        let x: u64 = SeededStream::new(0).derive(1).rng().random();
        let y: u64 = SeededStream::new(1).rng().random();
        assert_ne!(x, y);
        let p: u64 = SeededStream::new(5).derive(0).derive(1).rng().random();
        let q: u64 = SeededStream::new(5).derive(1).derive(0).rng().random();
        assert_ne!(p, q);
    }

    #[test]
    fn correlation_examples() {
        let e = estimate_correlation(&PairSampleSummary::new(3, 0, 0, 2)).unwrap();
        assert_eq!((e.value, e.stderr), (1.0, 0.0));
        let e = estimate_correlation(&PairSampleSummary::new(0, 4, 4, 0)).unwrap();
        assert_eq!((e.value, e.stderr), (-1.0, 0.0));
        let e = estimate_correlation(&PairSampleSummary::new(25, 25, 25, 25)).unwrap();
        assert_eq!(e.value, 0.0);
        assert!((e.stderr - 0.1).abs() < 1e-15);
    }

    #[test]
    fn empty_summary_is_an_error() {
        assert_eq!(
            estimate_correlation(&PairSampleSummary::default()),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn chunked_results_do_not_depend_on_thread_count() {
        let s = SeededStream::new(9);
        let run = || -> PairSampleSummary {
            run_chunked(300_000, &s, |rng, count| {
                let mut acc = PairSampleSummary::default();
                for _ in 0..count {
                    let a = if rng.random::<bool>() { 1 } else { -1 };
                    let b = if rng.random::<bool>() { 1 } else { -1 };
                    acc.record(a, b);
                }
                acc
            })
            .into_iter()
            .sum()
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(one, four);
        assert_eq!(one.total(), 300_000);
    }

    fn summary() -> impl Strategy<Value = PairSampleSummary> {
        (0u64..1000, 0u64..1000, 0u64..1000, 0u64..1000)
            .prop_map(|(a, b, c, d)| PairSampleSummary::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn merge_is_associative_and_commutative(a in summary(), b in summary(), c in summary()) {
            prop_assert_eq!(a.merge(&b), b.merge(&a));
            prop_assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
        }

        #[test]
        fn correlation_is_bounded(s in summary()) {
            prop_assume!(s.total() > 0);
            let e = s.correlation().unwrap();
            prop_assert!(e.value.abs() <= 1.0);
            prop_assert!(e.stderr >= 0.0);
        }

        #[test]
        fn merged_estimate_matches_concatenation(
            xs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200),
            split in 0usize..200,
        ) {
            let split = split.min(xs.len());
            let fold = |rows: &[(bool, bool)]| {
                let mut s = PairSampleSummary::default();
                for &(a, b) in rows {
                    s.record(if a { 1 } else { -1 }, if b { 1 } else { -1 });
                }
                s
            };
            let whole = fold(&xs);
            let merged = fold(&xs[..split]).merge(&fold(&xs[split..]));
            prop_assert_eq!(whole, merged);
            let direct: f64 = xs.iter().map(|&(a, b)| if a == b { 1.0 } else { -1.0 }).sum::<f64>()
                / xs.len() as f64;
            prop_assert!((merged.correlation().unwrap().value - direct).abs() < 1e-12);
        }
    }
}
