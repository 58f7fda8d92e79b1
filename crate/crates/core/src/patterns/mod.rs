//! Which photon patterns a small switch layer can route into the inputs a
//! generator circuit can use.
//!
//! Patterns are bit-sets over at most 64 modes.  A single MZI layer is a
//! perfect matching of the modes; each MZI either passes its two modes
//! straight through or swaps them.

mod networks;
mod rails;

pub use networks::{
    brute_force_two_layer_four, route_gmzi3_layer_six, route_two_layer_four, replay_gmzi3_layer_six, replay_two_layer_four,
    GmziSixRoute, TwoLayerRoute,
};
pub use rails::{bell_rail_rearrange_fraction, binning_probability, binning_probability_enumerated, Fraction, RailBlocks};

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::simkit::trial_rng;

/// Largest mode count for which exhaustive matching search is offered.
pub const MAX_SEARCH_MODES: usize = 12;

/// Occupied modes out of `modes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhotonPattern {
    modes: usize,
    bits: u64,
}

impl PhotonPattern {
    pub fn new(modes: usize, bits: u64) -> Result<Self> {
        if modes > 64 {
            return invalid(format!("at most 64 modes supported, got {modes}"));
        }
        if modes < 64 && bits >> modes != 0 {
            return invalid(format!("pattern {bits:#x} has photons beyond mode {}", modes.saturating_sub(1)));
        }
        Ok(Self { modes, bits })
    }

    pub fn from_modes(modes: usize, occupied: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &m in occupied {
            if m >= modes {
                return invalid(format!("mode {m} out of range for {modes} modes"));
            }
            if bits >> m & 1 == 1 {
                return invalid(format!("mode {m} listed twice"));
            }
            bits |= 1 << m;
        }
        Ok(Self { modes, bits })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn photons(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn contains(&self, mode: usize) -> bool {
        mode < self.modes && self.bits >> mode & 1 == 1
    }

    pub fn occupied(&self) -> Vec<usize> {
        (0..self.modes).filter(|&m| self.contains(m)).collect()
    }

    /// All patterns with exactly `k` photons, ascending by bit value.
    pub fn all_with(modes: usize, k: u32) -> Vec<PhotonPattern> {
        combinations(modes, k).map(|bits| PhotonPattern { modes, bits }).collect()
    }
}

impl fmt::Display for PhotonPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.occupied())
    }
}

impl Serialize for PhotonPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.occupied().serialize(s)
    }
}

/// Bit-sets over `n` elements with `k` ones in increasing numeric order
/// (Gosper's hack).
pub(crate) fn combinations(n: usize, k: u32) -> impl Iterator<Item = u64> {
    let limit: u128 = 1u128 << n;
    let start: Option<u64> = if k as usize > n {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some(((1u128 << k) - 1) as u64)
    };
    let mut next = start;
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur as u128 + c as u128;
            let v = ((r ^ cur as u128) >> 2) / c as u128 | r;
            (v < limit).then_some(v as u64)
        };
        Some(cur)
    })
}

/// One layer of MZIs; `pairs[i]` are the two modes of MZI `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MziLayerConfig {
    pub modes: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl MziLayerConfig {
    pub fn new(modes: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if modes > 64 {
            return invalid(format!("at most 64 modes supported, got {modes}"));
        }
        let mut seen = 0u64;
        for &(a, b) in &pairs {
            if a >= modes || b >= modes || a == b {
                return invalid(format!("bad MZI pair ({a}, {b}) for {modes} modes"));
            }
            if seen >> a & 1 == 1 || seen >> b & 1 == 1 {
                return invalid(format!("MZI pairs overlap at ({a}, {b})"));
            }
            seen |= 1 << a | 1 << b;
        }
        if pairs.len() * 2 != modes {
            return invalid("MZI pairs must cover every mode");
        }
        let pairs = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        Ok(Self { modes, pairs })
    }

    /// MZIs count; swap settings are bit-masks over this many MZIs.
    pub fn mzis(&self) -> usize {
        self.pairs.len()
    }

    /// Apply swap setting `mask` (bit `i` = MZI `i` crosses).
    pub fn apply(&self, mask: u64, bits: u64) -> u64 {
        let mut out = bits;
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let (x, y) = (bits >> a & 1, bits >> b & 1);
                out = out & !(1 << a) & !(1 << b) | x << b | y << a;
            }
        }
        out
    }

    /// Every pattern the layer can produce from some usable pattern, i.e.
    /// every routable input pattern.
    fn routable_set(&self, usable: &[u64]) -> HashSet<u64> {
        let mut set = HashSet::with_capacity(usable.len() << self.mzis().min(8));
        for mask in 0..1u64 << self.mzis() {
            for &u in usable {
                // swaps are involutions: x routes to u under mask iff x = mask(u)
                set.insert(self.apply(mask, u));
            }
        }
        set
    }

    /// Lowest swap setting that maps `pattern` into `usable`.
    pub fn witness(&self, pattern: u64, usable: &HashSet<u64>) -> Option<u64> {
        (0..1u64 << self.mzis()).find(|&m| usable.contains(&self.apply(m, pattern)))
    }
}

/// Pattern count and witnesses for one layer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub modes: usize,
    pub photons: u32,
    pub total_patterns: usize,
    pub routable_patterns: usize,
    /// Routable pattern and the lowest swap mask that routes it.
    pub witnesses: Vec<(PhotonPattern, u64)>,
    pub unroutable: Vec<PhotonPattern>,
}

impl CoverageReport {
    pub fn fraction(&self) -> f64 {
        self.routable_patterns as f64 / self.total_patterns as f64
    }
}

/// The 16 Bell-generator input patterns: for each `i < 4`, mode `i` or `i+4`.
pub fn bsg_usable_patterns() -> Vec<PhotonPattern> {
    paired_usable(4)
}

/// The 64 GHZ-generator input patterns over 12 modes: mode `i` or `i+6`.
pub fn ghz_usable_patterns() -> Vec<PhotonPattern> {
    paired_usable(6)
}

/// Patterns over `2h` modes choosing exactly one of `i`, `i+h` per `i`.
pub fn paired_usable(h: usize) -> Vec<PhotonPattern> {
    let mut v: Vec<PhotonPattern> = (0..1u64 << h)
        .map(|choice| {
            let bits = (0..h).map(|i| if choice >> i & 1 == 1 { 1u64 << (i + h) } else { 1 << i }).fold(0, |a, b| a | b);
            PhotonPattern { modes: 2 * h, bits }
        })
        .collect();
    v.sort();
    v
}

/// All perfect matchings of `0..n`, in lexicographic order of their sorted
/// pair lists.
pub fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for j in 0..free.len() {
            let b = free.remove(j);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(j, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    if n % 2 == 0 {
        rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    }
    out
}

fn check_usable(modes: usize, usable: &[PhotonPattern]) -> Result<Vec<u64>> {
    usable
        .iter()
        .map(|u| {
            if u.modes != modes {
                invalid(format!("usable pattern {u} is over {} modes, expected {modes}", u.modes))
            } else {
                Ok(u.bits)
            }
        })
        .collect()
}

/// Coverage of `photons`-photon patterns by one layer.
pub fn layer_coverage(layer: &MziLayerConfig, photons: u32, usable: &[PhotonPattern]) -> Result<CoverageReport> {
    let u = check_usable(layer.modes, usable)?;
    let uset: HashSet<u64> = u.iter().copied().collect();
    let mut witnesses = Vec::new();
    let mut unroutable = Vec::new();
    let all = PhotonPattern::all_with(layer.modes, photons);
    for p in &all {
        match layer.witness(p.bits, &uset) {
            Some(m) => witnesses.push((*p, m)),
            None => unroutable.push(*p),
        }
    }
    Ok(CoverageReport {
        modes: layer.modes,
        photons,
        total_patterns: all.len(),
        routable_patterns: witnesses.len(),
        witnesses,
        unroutable,
    })
}

/// Exhaustive search over every perfect matching for the layer routing the
/// most `photons`-photon patterns into `usable`.  Ties go to the
/// lexicographically first matching.
pub fn search_single_mzi_layer(modes: usize, photons: u32, usable: &[PhotonPattern]) -> Result<(MziLayerConfig, CoverageReport)> {
    if modes % 2 != 0 || modes == 0 {
        return invalid(format!("mode count {modes} must be positive and even"));
    }
    if modes > MAX_SEARCH_MODES {
        return Err(Error::SearchSpace { size: double_factorial(modes - 1), limit: double_factorial(MAX_SEARCH_MODES - 1) });
    }
    let u = check_usable(modes, usable)?;
    let matchings = perfect_matchings(modes);
    let counts: Vec<usize> = matchings
        .par_iter()
        .map(|pairs| {
            let layer = MziLayerConfig { modes, pairs: pairs.clone() };
            layer.routable_set(&u).iter().filter(|b| b.count_ones() == photons).count()
        })
        .collect();
    let best = (0..counts.len()).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
    let layer = MziLayerConfig { modes, pairs: matchings[best].clone() };
    let report = layer_coverage(&layer, photons, usable)?;
    debug_assert_eq!(report.routable_patterns, counts[best]);
    Ok((layer, report))
}

fn double_factorial(n: usize) -> f64 {
    (1..=n).rev().step_by(2).map(|x| x as f64).product()
}

/// Lowest-valued `k`-photon subpattern of `pattern` that the layer routes
/// into `usable`; muxes are assumed to route vacuum freely so any subset of
/// the photons may be kept.
pub fn routable_subpattern(layer: &MziLayerConfig, usable: &HashSet<u64>, pattern: PhotonPattern, k: u32) -> Option<PhotonPattern> {
    if pattern.photons() < k || k == 0 {
        return None;
    }
    let mut best: Option<u64> = None;
    // walk all submasks of the pattern
    let mut sub = pattern.bits;
    loop {
        if sub.count_ones() == k && layer.witness(sub, usable).is_some() && best.map_or(true, |b| sub < b) {
            best = Some(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & pattern.bits;
    }
    best.map(|bits| PhotonPattern { modes: pattern.modes, bits })
}

/// Whether every pattern with more than `k_target` photons has a routable
/// `k_target`-subpattern.
pub fn excess_photon_coverage(layer: &MziLayerConfig, k_target: u32, usable: &[PhotonPattern]) -> Result<bool> {
    let uset: HashSet<u64> = check_usable(layer.modes, usable)?.into_iter().collect();
    Ok(((k_target + 1)..=layer.modes as u32).all(|k| {
        combinations(layer.modes, k).all(|bits| routable_subpattern(layer, &uset, PhotonPattern { modes: layer.modes, bits }, k_target).is_some())
    }))
}

/// Fraction of `k`-photon patterns (for every `k`) with a routable
/// `k_target`-subpattern.
pub fn coverage_by_photon_count(layer: &MziLayerConfig, k_target: u32, usable: &[PhotonPattern]) -> Result<Vec<f64>> {
    let uset: HashSet<u64> = check_usable(layer.modes, usable)?.into_iter().collect();
    Ok((0..=layer.modes as u32)
        .map(|k| {
            let all: Vec<u64> = combinations(layer.modes, k).collect();
            let ok = all
                .par_iter()
                .filter(|&&bits| routable_subpattern(layer, &uset, PhotonPattern { modes: layer.modes, bits }, k_target).is_some())
                .count();
            ok as f64 / all.len() as f64
        })
        .collect())
}

/// Best single layer in front of the 12-mode GHZ generator (searched once).
pub fn ghz_best_layer() -> &'static (MziLayerConfig, CoverageReport) {
    static CELL: OnceLock<(MziLayerConfig, CoverageReport)> = OnceLock::new();
    CELL.get_or_init(|| search_single_mzi_layer(12, 6, &ghz_usable_patterns()).expect("12-mode search is in range"))
}

/// Routable fraction of `k`-photon patterns, `k = 0..=12`, for the best
/// 12-mode GHZ layer.
pub fn ghz_coverage_by_photon_count() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| coverage_by_photon_count(&ghz_best_layer().0, 6, &ghz_usable_patterns()).expect("consistent modes"))
}

/// Reduce a pattern with extra photons to `k` photons, choosing uniformly
/// (seeded) among the `k`-subpatterns accepted by `accept`.
pub fn prune_extras(pattern: PhotonPattern, k: u32, seed: u64, accept: impl Fn(PhotonPattern) -> bool) -> Option<PhotonPattern> {
    let occ = pattern.occupied();
    let subs: Vec<PhotonPattern> = combinations(occ.len(), k)
        .map(|sel| {
            let bits = (0..occ.len()).filter(|i| sel >> i & 1 == 1).fold(0u64, |a, i| a | 1 << occ[i]);
            PhotonPattern { modes: pattern.modes, bits }
        })
        .filter(|p| accept(*p))
        .collect();
    subs.choose(&mut trial_rng(seed, pattern.bits)).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gosper_counts() {
        assert_eq!(combinations(8, 4).count(), 70);
        assert_eq!(combinations(12, 6).count(), 924);
        assert_eq!(combinations(5, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(combinations(3, 4).count(), 0);
        assert_eq!(combinations(64, 64).collect::<Vec<_>>(), vec![u64::MAX]);
        let v: Vec<u64> = combinations(10, 3).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn matchings_are_lexicographic() {
        let m = perfect_matchings(6);
        assert_eq!(m.len(), 15);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(perfect_matchings(12).len(), 10395);
    }

    #[test]
    fn bsg_usable() {
        let u = bsg_usable_patterns();
        assert_eq!(u.len(), 16);
        assert!(u.contains(&PhotonPattern::from_modes(8, &[0, 1, 2, 3]).unwrap()));
        assert!(!u.contains(&PhotonPattern::from_modes(8, &[0, 4, 1, 2]).unwrap()));
    }

    #[test]
    fn swaps_are_involutions() {
        let l = MziLayerConfig::new(8, vec![(0, 1), (2, 3), (4, 6), (5, 7)]).unwrap();
        for m in 0..16 {
            for b in 0..256 {
                assert_eq!(l.apply(m, l.apply(m, b)), b);
                assert_eq!(l.apply(m, b).count_ones(), (b as u64).count_ones());
            }
        }
    }

    #[test]
    fn layer_rejects_bad_pairs() {
        assert!(MziLayerConfig::new(4, vec![(0, 1), (1, 2)]).is_err());
        assert!(MziLayerConfig::new(4, vec![(0, 1)]).is_err());
        assert!(MziLayerConfig::new(4, vec![(0, 4), (1, 2)]).is_err());
    }

    #[test]
    fn everything_usable_means_full_coverage() {
        let all = PhotonPattern::all_with(6, 3);
        let (_, r) = search_single_mzi_layer(6, 3, &all).unwrap();
        assert_eq!(r.routable_patterns, 20);
        assert!(search_single_mzi_layer(7, 3, &all).is_err());
        assert!(matches!(search_single_mzi_layer(14, 3, &[]), Err(Error::SearchSpace { .. })));
    }

    #[test]
    fn pruning_picks_accepted_subsets() {
        let p = PhotonPattern::from_modes(8, &[0, 1, 2, 4, 6]).unwrap();
        let q = prune_extras(p, 4, 3, |s| !s.contains(0)).unwrap();
        assert_eq!(q.occupied(), vec![1, 2, 4, 6]);
        let r = prune_extras(p, 4, 3, |_| true).unwrap();
        assert_eq!(r.bits() & !p.bits(), 0);
        assert_eq!(prune_extras(p, 4, 3, |_| true), prune_extras(p, 4, 3, |_| true));
        assert!(prune_extras(p, 4, 3, |_| false).is_none());
    }
}
