//! Monte-Carlo rastering, regular and enhanced.
//!
//! `m` muxes of `N/m` sources each fire once per step, four steps per
//! period.  A group needs `4/m` consecutive steps in which every mux
//! delivers.  Regular rastering uses windows aligned to the period;
//! enhanced rastering restarts the window after any failed step, so
//! groups can end in any of the four steps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::RasterStrategy;
use crate::error::{invalid, Result};
use crate::simkit::{estimate_many, Estimate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterSimulation {
    pub strategy: RasterStrategy,
    pub n: u64,
    pub p: f64,
    pub enhanced: bool,
    pub periods: u64,
    /// Groups per period.
    pub groups: Estimate,
    pub yield_estimate: Estimate,
    /// Groups completed in each step position of the period, summed over
    /// all trials.
    pub bin_histogram: [u64; 4],
}

fn window_steps(strategy: RasterStrategy) -> u64 {
    4 / strategy.muxes()
}

fn check(strategy: RasterStrategy, n: u64, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    let m = strategy.muxes();
    if n == 0 || n % m != 0 {
        return invalid(format!("{n} sources cannot be split over {m} muxes"));
    }
    Ok(())
}

/// Step outcomes for one trial: bit `s` set iff every mux delivered.
fn sample_steps<R: Rng>(rng: &mut R, strategy: RasterStrategy, n: u64, p: f64, steps: u64, out: &mut Vec<bool>) {
    let m = strategy.muxes();
    let per = n / m;
    out.clear();
    for _ in 0..steps {
        let mut all = true;
        for _ in 0..m {
            // draw every source so the stream does not depend on outcomes
            let mut fired = false;
            for _ in 0..per {
                fired |= rng.gen::<f64>() < p;
            }
            all &= fired;
        }
        out.push(all);
    }
}

/// Groups completed by each rule over one step sequence, and the step
/// index at which each group completed.
pub fn count_groups(steps: &[bool], window: usize, enhanced: bool) -> Vec<usize> {
    let mut ends = Vec::new();
    if enhanced {
        let mut run = 0;
        for (s, &ok) in steps.iter().enumerate() {
            run = if ok { run + 1 } else { 0 };
            if run == window {
                ends.push(s);
                run = 0;
            }
        }
    } else {
        for (w, chunk) in steps.chunks_exact(window).enumerate() {
            if chunk.iter().all(|&b| b) {
                ends.push(w * window + window - 1);
            }
        }
    }
    ends
}

/// Simulate `periods` consecutive periods per trial.  The step stream
/// depends only on `(strategy, n, p, seed)`, so regular and enhanced runs
/// with the same seed see the same source events.
pub fn raster_simulate(strategy: RasterStrategy, n: u64, p: f64, enhanced: bool, trials: u64, periods: u64, seed: u64) -> Result<RasterSimulation> {
    check(strategy, n, p)?;
    if periods == 0 {
        return invalid("need at least one period per trial");
    }
    let w = window_steps(strategy) as usize;
    let steps = 4 * periods;
    let hist: Vec<std::sync::atomic::AtomicU64> = (0..4).map(|_| Default::default()).collect();
    let est = estimate_many(trials, seed, 1, |rng, _, out| {
        let mut buf = Vec::with_capacity(steps as usize);
        sample_steps(rng, strategy, n, p, steps, &mut buf);
        let ends = count_groups(&buf, w, enhanced);
        for &e in &ends {
            hist[e % 4].fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        out[0] = ends.len() as f64 / periods as f64;
    })?;
    let groups = est[0];
    let yield_estimate = if p == 0.0 { groups.scaled(0.0) } else { groups.scaled(1.0 / (n as f64 * p)) };
    let h = |i: usize| hist[i].load(std::sync::atomic::Ordering::Relaxed);
    Ok(RasterSimulation { strategy, n, p, enhanced, periods, groups, yield_estimate, bin_histogram: [h(0), h(1), h(2), h(3)] })
}

/// Long-run groups per period under enhanced rastering: renewal rate of
/// runs of `w = 4/m` successful steps, each step succeeding with
/// `s = [1−(1−p)^{N/m}]^m`.
pub fn enhanced_raster_rate(strategy: RasterStrategy, n: u64, p: f64) -> Result<f64> {
    check(strategy, n, p)?;
    let m = strategy.muxes();
    let w = window_steps(strategy) as i32;
    let q = -((n / m) as f64 * (-p).ln_1p()).exp_m1();
    let s = q.powi(m as i32);
    if s >= 1.0 {
        return Ok(m as f64);
    }
    // 4 · s^w (1−s) / (1−s^w), written as a geometric sum
    let denom: f64 = (0..w).map(|i| s.powi(i)).sum();
    Ok(4.0 * s.powi(w) / denom)
}

pub fn enhanced_raster_yield(strategy: RasterStrategy, n: u64, p: f64) -> Result<f64> {
    Ok(enhanced_raster_rate(strategy, n, p)? / (n as f64 * p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_rules() {
        let s = [true, true, true, true, false, true, true, true, true, true, true, true];
        assert_eq!(count_groups(&s, 4, false), vec![3, 11]);
        assert_eq!(count_groups(&s, 4, true), vec![3, 8]);
        assert_eq!(count_groups(&s, 1, true), count_groups(&s, 1, false));
    }

    #[test]
    fn saturated_sources() {
        let r = raster_simulate(RasterStrategy::I, 8, 1.0, true, 16, 2, 1).unwrap();
        assert_eq!(r.groups.mean, 1.0);
        assert_eq!(r.bin_histogram, [0, 0, 0, 32]);
        assert_eq!(enhanced_raster_rate(RasterStrategy::III, 8, 1.0).unwrap(), 4.0);
        assert!(raster_simulate(RasterStrategy::II, 7, 0.1, false, 16, 1, 1).is_err());
    }
}
