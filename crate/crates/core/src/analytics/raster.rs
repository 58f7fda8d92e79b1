//! Expected output rates of four ways to fill four outputs per period `T`
//! with `N` sources that fire every `T/4`.

use serde::{Deserialize, Serialize};

use super::golden_section_max;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RasterStrategy {
    /// One N-to-1 mux rastered over four steps.
    I,
    /// Two N/2-to-1 muxes, each rastered over two steps.
    II,
    /// Four N/4-to-1 muxes, one per output, sources fired once per period.
    III,
    /// Four N/4-to-1 muxes rastered in parallel.
    IV,
}

impl RasterStrategy {
    pub const ALL: [RasterStrategy; 4] = [Self::I, Self::II, Self::III, Self::IV];

    /// Number of parallel muxes.
    pub fn muxes(self) -> u64 {
        match self {
            Self::I => 1,
            Self::II => 2,
            Self::III | Self::IV => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::I => "i",
            Self::II => "ii",
            Self::III => "iii",
            Self::IV => "iv",
        }
    }
}

impl std::str::FromStr for RasterStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Self::I),
            "ii" | "2" => Ok(Self::II),
            "iii" | "3" => Ok(Self::III),
            "iv" | "4" => Ok(Self::IV),
            _ => invalid(format!("unknown raster strategy {s:?}")),
        }
    }
}

/// Continuous-`n` form `m·[1 − (1−p)^{n/m}]⁴`.
fn rate_cont(m: f64, n: f64, p: f64) -> f64 {
    m * ((n / m) * (-p).ln_1p()).exp_m1().abs().powi(4)
}

/// Expected complete four-photon groups per period.
pub fn raster_rate(strategy: RasterStrategy, n: u64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    let m = strategy.muxes();
    if n == 0 || n % m != 0 {
        return invalid(format!("strategy {} needs N divisible by {m}, got {n}", strategy.label()));
    }
    Ok(m as f64 * (1.0 - (1.0 - p).powi((n / m) as i32)).powi(4))
}

/// Photons delivered in complete groups over photons heralded per period.
/// Every strategy fires all `N` sources four times per period — the muxes
/// of (iii) idle in between but the sources still herald — so the
/// denominator is `4·N·p`.
pub fn raster_yield(strategy: RasterStrategy, n: u64, p: f64) -> Result<f64> {
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(4.0 * raster_rate(strategy, n, p)? / (4.0 * n as f64 * p))
}

/// Maximum yield over a continuous source count at fixed `p`; returns
/// `(N·p, yield)`.
pub fn raster_yield_max(strategy: RasterStrategy, p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("probability {p} must lie in (0, 1)"));
    }
    let m = strategy.muxes() as f64;
    let (n, y) = golden_section_max(|n| rate_cont(m, n, p) / (n * p), 1.0, 60.0 / p, 1e-6 / p);
    Ok((n * p, y))
}

/// Source count where strategy (iii) overtakes (i): root of
/// `rate_i(N) = rate_iii(N)` in continuous `N`.
pub fn raster_crossover(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("probability {p} must lie in (0, 1)"));
    }
    let g = |n: f64| rate_cont(4.0, n, p) - rate_cont(1.0, n, p);
    // (i) wins for small N, (iii) for large N.
    let (mut lo, mut hi) = (4.0, 8.0);
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Domain("no crossover found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturated_sources() {
        assert_eq!(raster_rate(RasterStrategy::I, 16, 1.0).unwrap(), 1.0);
        assert_eq!(raster_rate(RasterStrategy::II, 16, 1.0).unwrap(), 2.0);
        assert_eq!(raster_rate(RasterStrategy::III, 16, 1.0).unwrap(), 4.0);
        assert_eq!(raster_rate(RasterStrategy::IV, 16, 1.0).unwrap(), 4.0);
        assert!(raster_rate(RasterStrategy::III, 18, 0.5).is_err());
    }

    #[test]
    fn yield_max_approaches_poisson_limit() {
        // max_x (1 − e^{−x})⁴ / x on a fine grid
        let grid_max = (1..200_000).map(|i| i as f64 * 1e-4).map(|x| (1.0 - (-x).exp()).powi(4) / x).fold(0.0, f64::max);
        let (_, y) = raster_yield_max(RasterStrategy::I, 1e-4).unwrap();
        assert!((y - grid_max).abs() < 1e-4, "{y} vs {grid_max}");
        let (_, y3) = raster_yield_max(RasterStrategy::III, 1e-4).unwrap();
        assert!((y - y3).abs() < 1e-4);
    }

    #[test]
    fn crossover_is_a_root() {
        let n = raster_crossover(0.05).unwrap();
        assert!((rate_cont(1.0, n, 0.05) - rate_cont(4.0, n, 0.05)).abs() < 1e-9);
        assert!(raster_rate(RasterStrategy::I, 64, 0.05).unwrap() > raster_rate(RasterStrategy::III, 64, 0.05).unwrap());
        assert!(raster_rate(RasterStrategy::I, 128, 0.05).unwrap() < raster_rate(RasterStrategy::III, 128, 0.05).unwrap());
    }

    #[test]
    fn parse_labels() {
        for s in RasterStrategy::ALL {
            assert_eq!(s.label().parse::<RasterStrategy>().unwrap(), s);
        }
        assert!("v".parse::<RasterStrategy>().is_err());
    }
}
