//! Seeded Monte-Carlo engine.
//!
//! Every trial draws from its own ChaCha8 stream: the key comes from the run
//! seed and the stream id is the trial index.  ChaCha is a counter-based
//! generator, so trial `i` sees the same numbers regardless of which thread
//! runs it or in which order.  Trials are reduced in fixed-size chunks whose
//! partial sums are merged in index order, so the estimate is bit-identical
//! for any thread count.

use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type TrialRng = ChaCha8Rng;

/// Trials per reduction chunk.  Part of the numeric contract: changing it
/// changes the last bits of reported means.
const CHUNK: u64 = 4096;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "MUXKIT_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over √trials.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    /// |mean − value| in units of the standard error (0 if both vanish).
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.mean - value).abs();
        if d == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY
        } else {
            d / self.stderr
        }
    }

    pub fn within_sigma(&self, value: f64, k: f64) -> bool {
        self.z_score(value) <= k
    }

    /// Scale mean and error by a constant.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { mean: self.mean * factor, stderr: self.stderr * factor.abs(), ..*self }
    }
}

/// Generator for trial `trial_index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial_index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Derive an independent run seed, e.g. one per parameter point.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // SplitMix64 finaliser over the combined words
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Row-major boolean grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoolGrid {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<bool>,
}

impl BoolGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: vec![false; rows * cols] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.cells[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.cells[r * self.cols + c] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }
}

fn bernoulli(p: f64) -> Result<Bernoulli> {
    Bernoulli::new(p).or_else(|_| invalid(format!("probability {p} outside [0, 1]")))
}

/// Independent Bernoulli(p) cells, deterministic in `(seed, trial_index)`.
pub fn sample_occupancy(rows: usize, cols: usize, p: f64, seed: u64, trial_index: u64) -> Result<BoolGrid> {
    let dist = bernoulli(p)?;
    let mut rng = trial_rng(seed, trial_index);
    let cells = (0..rows * cols).map(|_| dist.sample(&mut rng)).collect();
    Ok(BoolGrid { rows, cols, cells })
}

/// Fill `out` with independent Bernoulli(p) draws from `rng`.
pub fn fill_bernoulli(rng: &mut TrialRng, dist: &Bernoulli, out: &mut [bool]) {
    for c in out.iter_mut() {
        *c = dist.sample(rng);
    }
}

pub fn bernoulli_dist(p: f64) -> Result<Bernoulli> {
    bernoulli(p)
}

/// Kahan–Babuška compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Per-chunk moments merged with Chan's pairwise update.
#[derive(Clone, Copy, Debug)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn from_values(v: &[f64]) -> Self {
        let mut s = KahanSum::default();
        v.iter().for_each(|&x| s.add(x));
        let n = v.len() as f64;
        let mean = s.value() / n;
        let mut m2 = KahanSum::default();
        v.iter().for_each(|&x| m2.add((x - mean) * (x - mean)));
        Self { n, mean, m2: m2.value() }
    }

    fn merge(self, o: Self) -> Self {
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * o.n / n,
            m2: self.m2 + o.m2 + delta * delta * self.n * o.n / n,
        }
    }
}

/// Estimate several per-trial quantities at once.  `event` receives the
/// trial's generator and index and writes `width` values.
pub fn estimate_many<F>(trials: u64, seed: u64, width: usize, event: F) -> Result<Vec<Estimate>>
where
    F: Fn(&mut TrialRng, u64, &mut [f64]) + Sync,
{
    if trials < 2 {
        return invalid("estimate needs at least 2 trials");
    }
    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            let len = (hi - lo) as usize;
            let mut cols = vec![Vec::with_capacity(len); width];
            let mut buf = vec![0.0; width];
            for t in lo..hi {
                let mut rng = trial_rng(seed, t);
                buf.iter_mut().for_each(|b| *b = 0.0);
                event(&mut rng, t, &mut buf);
                for (col, &b) in cols.iter_mut().zip(&buf) {
                    col.push(b);
                }
            }
            cols.iter().map(|c| Moments::from_values(c)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(width);
    for j in 0..width {
        let m = partials.iter().map(|p| p[j]).reduce(Moments::merge).expect("trials >= 2");
        let var = m.m2 / (m.n - 1.0);
        out.push(Estimate { mean: m.mean, stderr: (var.max(0.0) / m.n).sqrt(), trials, seed });
    }
    Ok(out)
}

/// Mean and standard error of a scalar per-trial event.
pub fn estimate<F>(trials: u64, seed: u64, event: F) -> Result<Estimate>
where
    F: Fn(&mut TrialRng, u64) -> f64 + Sync,
{
    Ok(estimate_many(trials, seed, 1, |rng, t, out| out[0] = event(rng, t))?[0])
}

/// Cap the global worker pool at `$MUXKIT_THREADS` if it is set.  Returns
/// the cap applied, if any.  Safe to call more than once.
pub fn configure_threads_from_env() -> Option<usize> {
    let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn occupancy_extremes() {
        assert_eq!(sample_occupancy(4, 5, 0.0, 1, 0).unwrap().count(), 0);
        assert_eq!(sample_occupancy(4, 5, 1.0, 1, 0).unwrap().count(), 20);
        assert!(sample_occupancy(1, 1, 1.5, 1, 0).is_err());
    }

    #[test]
    fn occupancy_is_deterministic() {
        let a = sample_occupancy(8, 8, 0.3, 42, 17).unwrap();
        let b = sample_occupancy(8, 8, 0.3, 42, 17).unwrap();
        let c = sample_occupancy(8, 8, 0.3, 42, 18).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn constant_event_has_zero_error() {
        let e = estimate(1000, 3, |_, _| 0.25).unwrap();
        assert_eq!(e.mean, 0.25);
        assert_eq!(e.stderr, 0.0);
        assert!(estimate(1, 3, |_, _| 0.0).is_err());
    }

    #[test]
    fn thread_count_does_not_change_estimates() {
        let ev = |rng: &mut TrialRng, _t: u64| rng.gen::<f64>();
        let a = estimate(20_000, 9, ev).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate(20_000, 9, ev).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let mut s = KahanSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn seeds_derive_distinct_streams() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(5, 9), derive_seed(5, 9));
    }
}
