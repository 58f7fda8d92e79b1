//! Four-photon input states for Bell-state generators fed from pairs of
//! squeezed sources.

use serde::{Deserialize, Serialize};

use super::dist::choose;
use crate::error::{domain, invalid, Result};

/// Success probability of the basic Bell-state generator.
pub const BSG_SMALL: f64 = 3.0 / 16.0;
/// Success probability of the enlarged generator variant.
pub const BSG_LARGE: f64 = 3.0 / 32.0;

/// Squeezing parameter `r` and vacuum probability for a source that heralds
/// a single photon with probability `p = tanh²r / cosh²r`.
pub fn squeezed_source(p: f64) -> Result<(f64, f64)> {
    if !(0.0..=0.25).contains(&p) {
        return domain(format!("single-photon probability {p} must lie in [0, 0.25] for a squeezed source"));
    }
    let root = (1.0 - 4.0 * p).max(0.0).sqrt();
    let p_vac = (1.0 + root) / 2.0;
    // tanh²r = 1 − p_vac
    let r = (1.0 - p_vac).sqrt().atanh();
    Ok((r, p_vac))
}

fn check_even(n: u64) -> Result<()> {
    if n % 2 != 0 {
        return invalid(format!("source count {n} must be even (sources come in pairs)"));
    }
    Ok(())
}

/// Ballistic routing: exactly one photon in each of four distinct pairs and
/// vacuum everywhere else, `2⁴·C(N/2,4)·p⁴·p_vac^{N−4}`.
pub fn p4_ballistic(n: u64, p: f64) -> Result<f64> {
    check_even(n)?;
    if n < 8 {
        return invalid(format!("need at least 8 sources, got {n}"));
    }
    let (_, p_vac) = squeezed_source(p)?;
    Ok(16.0 * choose(n / 2, 4) as f64 * p.powi(4) * p_vac.powi((n - 4) as i32))
}

/// Blocking switches: at least four of the `N/2` pairs herald,
/// `1 − Σ_{k<4} C(N/2,k)·(1−(1−p)²)^k·(1−p)^{N−2k}`.
pub fn p4_blocking(n: u64, p: f64) -> Result<f64> {
    check_even(n)?;
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    let pair = 1.0 - (1.0 - p) * (1.0 - p);
    let mut miss = 0.0;
    for k in 0..4u64.min(n / 2 + 1) {
        miss += choose(n / 2, k) as f64 * pair.powi(k as i32) * (1.0 - p).powi((n - 2 * k) as i32);
    }
    Ok((1.0 - miss).clamp(0.0, 1.0))
}

/// Blocking scheme fed by `n_mux`-to-1 pre-muxes.
pub fn p4_with_premux(n: u64, p: f64, n_mux: u64) -> Result<f64> {
    if n_mux == 0 || n % n_mux != 0 {
        return invalid(format!("pre-mux size {n_mux} must divide {n}"));
    }
    p4_blocking(n / n_mux, 1.0 - (1.0 - p).powi(n_mux as i32))
}

/// Average generator success when the four photons land on random pairs:
/// the small circuit applies only when no two photons share a quarter of the
/// rails.
pub fn p_bsg(n: u64) -> Result<f64> {
    check_even(n)?;
    if n < 8 {
        return invalid(format!("need at least 8 modes, got {n}"));
    }
    let h = n / 2;
    let f = 0.25 * choose(h, 3) as f64 / choose(h, 4) as f64;
    Ok(f * BSG_SMALL + (1.0 - f) * BSG_LARGE)
}

/// Repetitions `K`, footprint `S = N·K` and the small-rate approximation
/// needed for an output probability `p_out`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub k: f64,
    pub s: f64,
    pub s_approx: f64,
}

pub fn footprint(n: u64, p: f64, y: f64, p_bsg: f64, p_out: f64) -> Result<Footprint> {
    for (name, v) in [("p", p), ("Y", y), ("P_bsg", p_bsg), ("p_out", p_out)] {
        if !(v > 0.0 && v < 1.0) {
            return invalid(format!("{name} = {v} must lie in (0, 1)"));
        }
    }
    let x = n as f64 * p * y * p_bsg / 4.0;
    if x >= 1.0 {
        return domain(format!("N·p·Y·P/4 = {x} must be below 1"));
    }
    let k = (-p_out).ln_1p() / (-x).ln_1p();
    Ok(Footprint { k, s: n as f64 * k, s_approx: -4.0 * (-p_out).ln_1p() / (p * p_bsg * y) })
}
