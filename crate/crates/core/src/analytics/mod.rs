//! Closed-form success probabilities and yields for single-photon muxes.
//!
//! Conventions: `N` sources, each heralding a photon with probability `p`
//! per time bin; a mux "succeeds" when it delivers its target output; the
//! yield is photons delivered in complete groups over photons generated.

mod bell;
mod dist;
mod raster;

pub use bell::{footprint, p4_ballistic, p4_blocking, p4_with_premux, p_bsg, squeezed_source, Footprint, BSG_LARGE, BSG_SMALL};
pub use dist::{binomial_pmf, binomial_poisson_tail_gap, binomial_sf, choose, ln_choose, poisson_pmf, poisson_sf};
pub use raster::{
    raster_crossover, raster_rate, raster_yield, raster_yield_max, RasterStrategy,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

/// Photon-number statistics of a bank of sources.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceStatistics {
    Binomial,
    /// Poisson with λ = N·p.
    Poisson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub n: u64,
    pub p: f64,
    pub statistics: SourceStatistics,
}

impl SourceModel {
    /// P[at least k photons heralded].
    pub fn at_least(&self, k: u64) -> Result<f64> {
        match self.statistics {
            SourceStatistics::Binomial => binomial_sf(self.n, self.p, k),
            SourceStatistics::Poisson => poisson_sf(self.n as f64 * self.p, k),
        }
    }
}

/// A sampled curve, e.g. yield against mean photon number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YieldCurve {
    pub strategy: String,
    pub points: Vec<(f64, f64)>,
}

/// `1 − (1−p)^N`.
pub fn p_mux_single(n: u64, p: f64) -> Result<f64> {
    check_prob(p)?;
    Ok(-((n as f64) * (-p).ln_1p()).exp_m1())
}

/// `m` independent `N/m`-to-1 muxes all succeeding: `[1 − (1−p)^{N/m}]^m`.
pub fn naive_group_pmux(n: u64, p: f64, m: u64) -> Result<f64> {
    if m == 0 || n % m != 0 {
        return invalid(format!("group size {m} must divide the source count {n}"));
    }
    Ok(p_mux_single(n / m, p)?.powi(m as i32))
}

/// Perfect N-to-m routing: P[Binomial(N, p) ≥ m].
pub fn optimal_group_pmux(n: u64, p: f64, m: u64) -> Result<f64> {
    binomial_sf(n, p, m)
}

/// Yield of `g` generators each consuming `m` photons from a Poisson(λ)
/// source bank.
///
/// With sharing, all photons are pooled: `Y = m·E[min(g, ⌊X/m⌋)]/λ`.
/// Without, each generator has its own Poisson(λ/g) bank.
pub fn yield_multi_generator(lambda: f64, m: u64, g: u64, sharing: bool) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return invalid(format!("mean photon number {lambda} must be positive"));
    }
    if g == 0 || m == 0 {
        return invalid("group size and generator count must be >= 1");
    }
    let mf = m as f64;
    if sharing {
        // E[min(g, ⌊X/m⌋)] = Σ_{j=1..g} P[X ≥ j·m]
        let mut e = 0.0;
        for j in 1..=g {
            e += poisson_sf(lambda, j * m)?;
        }
        Ok(mf * e / lambda)
    } else {
        Ok(mf * g as f64 * poisson_sf(lambda / g as f64, m)? / lambda)
    }
}

/// Golden-section search for the maximum of a unimodal function.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// Location and value of the yield maximum over λ ∈ [0.1, 50].
pub fn yield_max(m: u64, g: u64, sharing: bool) -> Result<(f64, f64)> {
    yield_multi_generator(1.0, m, g, sharing)?;
    Ok(golden_section_max(
        |l| yield_multi_generator(l, m, g, sharing).unwrap_or(0.0),
        0.1,
        50.0,
        1e-4,
    ))
}

/// Sources needed by the naive and optimal schemes to reach `target`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourcesRatio {
    pub n_naive: u64,
    pub n_optimal: u64,
    pub ratio: f64,
}

/// `N_naive / N_optimal` for a target group success probability.
///
/// `N_naive` uses the continuous form `[1 − (1−p)^{N/m}]^m` (so `N` need
/// not be a multiple of `m`); `N_optimal` the exact binomial tail.  Both
/// are the minimal integers meeting the target.
pub fn required_sources_ratio(p: f64, target: f64, m: u64) -> Result<SourcesRatio> {
    check_prob(p)?;
    if p == 0.0 {
        return Err(Error::Domain("no number of sources reaches the target when p = 0".into()));
    }
    if !(0.0 < target && target < 1.0) {
        return invalid(format!("target {target} must lie in (0, 1)"));
    }
    if m == 0 {
        return invalid("group size must be >= 1");
    }
    let naive = |n: u64| -> f64 { (-((n as f64 / m as f64) * (-p).ln_1p()).exp_m1()).powi(m as i32) };
    let opt = |n: u64| -> f64 { binomial_sf(n, p, m).unwrap_or(0.0) };
    let n_naive = min_n(naive, target, 1)?;
    let n_optimal = min_n(opt, target, m)?;
    Ok(SourcesRatio { n_naive, n_optimal, ratio: n_naive as f64 / n_optimal as f64 })
}

fn min_n(f: impl Fn(u64) -> f64, target: f64, start: u64) -> Result<u64> {
    let mut hi = start.max(1);
    while f(hi) < target {
        hi = hi.checked_mul(2).ok_or_else(|| Error::Domain("target unreachable".into()))?;
        if hi > 1 << 40 {
            return Err(Error::Domain("target unreachable within 2^40 sources".into()));
        }
    }
    let mut lo = start.max(1) - 1;
    // invariant: f(lo) < target (or lo is below the start), f(hi) >= target
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Ratio of mux sizes needed for success target `target` when the
/// per-attempt success rises from `q_small` to `q_large`, using the
/// continuous size `n = ln(1−target)/ln(1−q)`.
pub fn mux_size_ratio(target: f64, q_small: f64, q_large: f64) -> Result<f64> {
    if !(0.0 < target && target < 1.0) {
        return invalid(format!("target {target} must lie in (0, 1)"));
    }
    let n = |q: f64| (-target).ln_1p() / (-q).ln_1p();
    Ok(n(q_small) / n(q_large))
}

/// Mux-size reduction from enlarging a BSG GMZI (success 1/8 → 3/16).
pub fn enlarged_gmzi_mux_reduction(target: f64) -> Result<f64> {
    mux_size_ratio(target, 1.0 / 8.0, 3.0 / 16.0)
}

/// Improvement factors for the 12-mode GHZ example at N = 48, p = 0.05.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzFactors {
    pub baseline: f64,
    pub p_mzi: f64,
    pub p_optimal: f64,
    pub p_doubled: f64,
    pub factor_mzi: f64,
    pub factor_optimal: f64,
    pub factor_doubled: f64,
}

/// GHZ example folded over the single-MZI-layer coverage table.
///
/// Twelve 4-to-1 muxes feed one MZI layer in front of a six-input GHZ
/// generator; `coverage(k)` is the fraction of k-photon output patterns of
/// the muxes that the layer can route (with vacuum routed freely).
pub fn ghz_improvement_with(coverage: impl Fn(u64) -> f64) -> GhzFactors {
    let p: f64 = 0.05;
    let q = 1.0 - (1.0 - p).powi(4);
    let baseline = (1.0 - (1.0 - p).powi(8)).powi(6);
    let p_mzi: f64 = (0..=12u64).map(|k| binomial_pmf(12, q, k) * coverage(k)).sum();
    let p_optimal = binomial_sf(48, p, 6).expect("valid probability");
    let p_doubled = (1.0 - (1.0 - p).powi(16)).powi(6);
    GhzFactors {
        baseline,
        p_mzi,
        p_optimal,
        p_doubled,
        factor_mzi: p_mzi / baseline,
        factor_optimal: p_optimal / baseline,
        factor_doubled: p_doubled / baseline,
    }
}

/// [`ghz_improvement_with`] using the exhaustive 12-mode layer search.
pub fn ghz_improvement_example() -> GhzFactors {
    let table = crate::patterns::ghz_coverage_by_photon_count();
    ghz_improvement_with(|k| table[k as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mux() {
        assert_eq!(p_mux_single(10, 0.0).unwrap(), 0.0);
        assert_eq!(p_mux_single(10, 1.0).unwrap(), 1.0);
        assert!((p_mux_single(64, 0.05).unwrap() - (1.0 - 0.95f64.powi(64))).abs() < 1e-15);
    }

    #[test]
    fn naive_and_optimal() {
        assert!((naive_group_pmux(16, 0.25, 4).unwrap() - (1.0 - 0.75f64.powi(4)).powi(4)).abs() < 1e-15);
        assert!((naive_group_pmux(8, 0.5, 4).unwrap() - 0.75f64.powi(4)).abs() < 1e-15);
        assert!(naive_group_pmux(10, 0.5, 4).is_err());
        assert_eq!(optimal_group_pmux(10, 1.0, 4).unwrap(), 1.0);
        let direct: f64 = (4..=16).map(|k| choose(16, k) as f64 * 0.25f64.powi(k as i32) * 0.75f64.powi(16 - k as i32)).sum();
        assert!((optimal_group_pmux(16, 0.25, 4).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn sharing_expectation_matches_direct_sum() {
        // E[min(g, ⌊X/m⌋)] summed term by term
        for &(l, m, g) in &[(4.0, 4u64, 1u64), (7.4, 4, 2), (10.0, 4, 3), (12.0, 6, 3)] {
            let e: f64 = (0..400u64).map(|k| poisson_pmf(l, k) * (k / m).min(g) as f64).sum();
            let want = m as f64 * e / l;
            assert!((yield_multi_generator(l, m, g, true).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, y) = golden_section_max(|x| -(x - 2.5) * (x - 2.5) + 1.0, 0.0, 10.0, 1e-8);
        assert!((x - 2.5).abs() < 1e-6 && (y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sources_ratio() {
        let r = required_sources_ratio(0.05, 0.99, 4).unwrap();
        assert_eq!((r.n_naive, r.n_optimal), (467, 198));
        // the Poisson approximation of the tail needs λ ≥ 10.045…, i.e. 201 sources
        assert!(poisson_sf(200.0 * 0.05, 4).unwrap() < 0.99 && poisson_sf(201.0 * 0.05, 4).unwrap() >= 0.99);
        assert!((r.ratio - 2.3).abs() < 0.1);
        assert!(required_sources_ratio(0.0, 0.9, 4).is_err());
        let r9 = required_sources_ratio(0.05, 0.9, 4).unwrap();
        assert!(r9.ratio > 2.0 && r9.ratio < 2.6);
    }

    #[test]
    fn enlarged_ratio_independent_of_target() {
        let a = enlarged_gmzi_mux_reduction(0.5).unwrap();
        let b = enlarged_gmzi_mux_reduction(0.999).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((mux_size_ratio(0.7, 0.2, 0.2).unwrap() - 1.0).abs() < 1e-15);
    }
}
