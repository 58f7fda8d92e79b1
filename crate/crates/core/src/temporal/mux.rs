//! de Bruijn delay-network muxes.
//!
//! `m` sources feed a cyclic GMZI for `b` time bins.  The GMZI sends mode
//! `i` to port `c + i` of a delay bank whose delays follow a de Bruijn
//! sequence over `{0..b}` with word length `m`, so every choice of one bin
//! per mode has a window of delays that brings the photons into the same
//! output bin.  A second GMZI shifts ports `c..c+m` back to outputs `0..m`.
//!
//! With the Tetris strategy the input stage also rotates the modes of each
//! time bin by its own cyclic shift `r_t` before the window offset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::debruijn::{de_bruijn, reduced_de_bruijn, DeBruijnSequence};
use crate::error::{invalid, Error, Result};
use crate::simkit::{estimate_many, Estimate};

/// `m` modes × `b` bins of source events, stored as one mode mask per bin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceTimeOccupancy {
    pub modes: usize,
    pub bins: usize,
    /// `columns[t]` has bit `j` set when source `j` fired in bin `t`.
    pub columns: Vec<u64>,
}

impl SpaceTimeOccupancy {
    pub fn new(modes: usize, bins: usize) -> Result<Self> {
        if modes == 0 || bins == 0 || modes > 64 {
            return invalid(format!("occupancy needs 1..=64 modes and >= 1 bin, got {modes} × {bins}"));
        }
        Ok(Self { modes, bins, columns: vec![0; bins] })
    }

    /// Bit `j·b + t` of `code` marks mode `j`, bin `t`.
    pub fn from_code(modes: usize, bins: usize, code: u64) -> Result<Self> {
        let mut o = Self::new(modes, bins)?;
        for j in 0..modes {
            for t in 0..bins {
                if code >> (j * bins + t) & 1 == 1 {
                    o.columns[t] |= 1 << j;
                }
            }
        }
        Ok(o)
    }

    pub fn get(&self, mode: usize, bin: usize) -> bool {
        self.columns[bin] >> mode & 1 == 1
    }

    pub fn set(&mut self, mode: usize, bin: usize, v: bool) {
        if v {
            self.columns[bin] |= 1 << mode;
        } else {
            self.columns[bin] &= !(1 << mode);
        }
    }

    pub fn photons(&self) -> u32 {
        self.columns.iter().map(|c| c.count_ones()).sum()
    }

    fn full_mask(&self) -> u64 {
        if self.modes == 64 {
            u64::MAX
        } else {
            (1 << self.modes) - 1
        }
    }

    /// Column `t` with its modes rotated up by `r` (`j → j + r mod m`).
    fn rotated(&self, t: usize, r: usize) -> u64 {
        let m = self.modes;
        let c = self.columns[t];
        if r == 0 {
            return c;
        }
        ((c << r) | (c >> (m - r))) & self.full_mask()
    }
}

/// Delay bank between the two GMZIs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayNetwork {
    pub modes: usize,
    pub bins: usize,
    /// Delay in bins at each port.
    pub delays: Vec<usize>,
    pub reduced: bool,
    #[serde(skip)]
    windows: Vec<Option<usize>>,
}

impl DelayNetwork {
    /// Full (`b^m` ports) or reduced (`b^m − (b−1)^m` ports) network.  The
    /// reduced one only aligns photons relative to each other, so the
    /// output bin depends on the pattern.
    pub fn de_bruijn(modes: usize, bins: usize, reduced: bool) -> Result<Self> {
        let seq = if reduced { reduced_de_bruijn(bins, modes)? } else { de_bruijn(bins, modes)? };
        Ok(Self::from_sequence(modes, &seq))
    }

    fn from_sequence(modes: usize, seq: &DeBruijnSequence) -> Self {
        Self { modes, bins: seq.k, delays: seq.symbols.clone(), reduced: seq.reduced, windows: seq.positions() }
    }

    pub fn ports(&self) -> usize {
        self.delays.len()
    }

    fn window_for(&self, word: &[usize]) -> Option<usize> {
        let code = word.iter().fold(0, |a, &s| a * self.bins + s);
        self.windows.get(code).copied().flatten()
    }
}

/// Witness for one routed window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeBruijnSchedule {
    /// Per-bin cyclic rotation of the input modes (all zero without
    /// Tetris).
    pub rotations: Vec<usize>,
    /// First port of the delay window.
    pub window: usize,
    /// Bin chosen for each output mode.
    pub picks: Vec<usize>,
    pub output_time: usize,
}

fn check_dims(occ: &SpaceTimeOccupancy, net: &DelayNetwork) -> Result<()> {
    if occ.modes != net.modes || occ.bins != net.bins {
        return Err(Error::DimensionMismatch(format!(
            "occupancy is {} × {}, network expects {} × {}",
            occ.modes, occ.bins, net.modes, net.bins
        )));
    }
    Ok(())
}

/// Find a schedule that delivers one photon to each of the `m` outputs in
/// a common bin.  Tetris rotations are searched in lexicographic order.
pub fn debruijn_mux_route(occ: &SpaceTimeOccupancy, net: &DelayNetwork, tetris: bool) -> Result<Option<DeBruijnSchedule>> {
    check_dims(occ, net)?;
    let (m, b) = (occ.modes, occ.bins);
    let full = occ.full_mask();
    let mut r = vec![0usize; b];
    loop {
        let covered = (0..b).fold(0u64, |acc, t| acc | occ.rotated(t, r[t]));
        if covered == full {
            // earliest bin per output mode
            let picks: Vec<usize> = (0..m).map(|i| (0..b).find(|&t| occ.rotated(t, r[t]) >> i & 1 == 1).unwrap()).collect();
            let output_time = if net.reduced { *picks.iter().max().unwrap() } else { b - 1 };
            let word: Vec<usize> = picks.iter().map(|&t| output_time - t).collect();
            let window = net.window_for(&word).ok_or_else(|| Error::Internal(format!("delay word {word:?} missing from network")))?;
            return Ok(Some(DeBruijnSchedule { rotations: r, window, picks, output_time }));
        }
        if !tetris || !advance(&mut r, m) {
            return Ok(None);
        }
    }
}

/// Odometer step over `Z_m^b`; false after the last vector.
fn advance(r: &mut [usize], m: usize) -> bool {
    for x in r.iter_mut() {
        *x += 1;
        if *x < m {
            return true;
        }
        *x = 0;
    }
    false
}

/// Discrete-event replay: push every photon through the rotation, the
/// window offset, its port delay and the output shift, and return the
/// output bin if all `m` outputs are filled together at the scheduled time.
pub fn replay_debruijn(occ: &SpaceTimeOccupancy, net: &DelayNetwork, s: &DeBruijnSchedule) -> Option<usize> {
    let (m, b) = (occ.modes, occ.bins);
    if s.rotations.len() != b || s.rotations.iter().any(|&r| r >= m) {
        return None;
    }
    let ports = net.ports();
    let mut arrivals: Vec<(usize, usize)> = Vec::new(); // (time, output mode)
    for t in 0..b {
        for j in 0..m {
            if occ.get(j, t) {
                let port = (s.window + (j + s.rotations[t]) % m) % ports;
                let time = t + net.delays[port];
                let out = (port + ports - s.window) % ports;
                arrivals.push((time, out));
            }
        }
    }
    let mut filled = 0u64;
    for &(time, out) in &arrivals {
        if time == s.output_time && out < m {
            if filled >> out & 1 == 1 {
                return None; // two photons in one output bin
            }
            filled |= 1 << out;
        }
    }
    (filled == occ.full_mask()).then_some(s.output_time)
}

/// Exact success probability: every occupancy of the `m × b` window
/// weighted by `p^k (1−p)^{mb−k}`.  Also returns the number of routable
/// occupancies with `k` photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmuxEnumeration {
    pub p: f64,
    pub p_mux: f64,
    pub routable_by_photons: Vec<u64>,
}

pub fn debruijn_pmux_exact(net: &DelayNetwork, p: f64, tetris: bool) -> Result<PmuxEnumeration> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    let cells = net.modes * net.bins;
    if cells > 24 {
        return Err(Error::SearchSpace { size: 2f64.powi(cells as i32), limit: 2f64.powi(24) });
    }
    let counts = routable_counts(net, tetris)?;
    let p_mux = counts.iter().enumerate().map(|(k, &c)| c as f64 * p.powi(k as i32) * (1.0 - p).powi((cells - k) as i32)).sum();
    Ok(PmuxEnumeration { p, p_mux, routable_by_photons: counts })
}

/// Routable occupancies per photon count (independent of `p`).
pub fn routable_counts(net: &DelayNetwork, tetris: bool) -> Result<Vec<u64>> {
    let cells = net.modes * net.bins;
    if cells > 24 {
        return Err(Error::SearchSpace { size: 2f64.powi(cells as i32), limit: 2f64.powi(24) });
    }
    let (m, b) = (net.modes, net.bins);
    (0..1u64 << cells)
        .into_par_iter()
        .map(|code| {
            let occ = SpaceTimeOccupancy::from_code(m, b, code)?;
            let mut v = vec![0u64; cells + 1];
            if debruijn_mux_route(&occ, net, tetris)?.is_some() {
                v[code.count_ones() as usize] = 1;
            }
            Ok(v)
        })
        .try_reduce(|| vec![0u64; cells + 1], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))
}

/// Monte-Carlo success probabilities without and with Tetris (same
/// occupancies for both).
pub fn debruijn_pmux_mc(net: &DelayNetwork, p: f64, trials: u64, seed: u64) -> Result<(Estimate, Estimate)> {
    use rand::Rng;
    let (m, b) = (net.modes, net.bins);
    let est = estimate_many(trials, seed, 2, |rng, _, out| {
        let mut occ = SpaceTimeOccupancy::new(m, b).expect("network dims are valid");
        for t in 0..b {
            for j in 0..m {
                if rng.gen::<f64>() < p {
                    occ.set(j, t, true);
                }
            }
        }
        out[0] = debruijn_mux_route(&occ, net, false).ok().flatten().is_some() as u8 as f64;
        out[1] = debruijn_mux_route(&occ, net, true).ok().flatten().is_some() as u8 as f64;
    })?;
    Ok((est[0], est[1]))
}

/// Without Tetris a window routes iff every mode fired at least once.
pub fn debruijn_pmux_single(modes: usize, bins: usize, p: f64) -> f64 {
    (1.0 - (1.0 - p).powi(bins as i32)).powi(modes as i32)
}

/// Routing through the spatio-temporal network: crossings gather `n`
/// photons from `m > n` modes into contiguous modes, delays then align
/// them.  Both stages use reduced de Bruijn sequences, so only relative
/// offsets matter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatioTemporalRoute {
    /// Setting of the first cyclic GMZI: the lowest gathered mode.
    pub base: usize,
    /// Crossing offset of each gathered mode (`mode = base + i + offset`).
    pub offsets: Vec<usize>,
    pub bins: Vec<usize>,
    /// Delay applied to each gathered photon.
    pub delays: Vec<usize>,
    pub output_time: usize,
}

impl SpatioTemporalRoute {
    pub fn modes(&self, m: usize) -> Vec<usize> {
        self.offsets.iter().enumerate().map(|(i, &e)| (self.base + i + e) % m).collect()
    }
}

/// Crossing words over `{0..=max_cross}` of length `n` that contain a zero
/// and gather distinct modes, in the order the crossing sequence lists
/// them.
fn crossing_words(m: usize, n: usize, max_cross: usize) -> Result<Vec<Vec<usize>>> {
    if n == 0 || m <= n {
        return invalid(format!("need more modes ({m}) than the group size ({n})"));
    }
    let seq = reduced_de_bruijn(max_cross + 1, n)?;
    Ok((0..seq.len())
        .map(|i| seq.window(i))
        .filter(|w| {
            let mut seen = 0u128;
            w.iter().enumerate().all(|(i, &e)| {
                let mode = (i + e) % m;
                let fresh = seen >> mode & 1 == 0;
                seen |= 1 << mode;
                fresh
            })
        })
        .collect())
}

/// First route (scanning output bins, then GMZI settings, then crossing
/// windows) for a group of `n` photons.
pub fn spatiotemporal_debruijn(occ: &SpaceTimeOccupancy, n: usize, max_cross: usize, max_delay: usize) -> Result<Option<SpatioTemporalRoute>> {
    let words = crossing_words(occ.modes, n, max_cross)?;
    Ok(route_with_words(occ, n, max_delay, &words))
}

fn route_with_words(occ: &SpaceTimeOccupancy, n: usize, max_delay: usize, words: &[Vec<usize>]) -> Option<SpatioTemporalRoute> {
    let m = occ.modes;
    for t_out in 0..occ.bins {
        let lo = t_out.saturating_sub(max_delay);
        for base in 0..m {
            'word: for w in words {
                let mut bins = Vec::with_capacity(n);
                for (i, &e) in w.iter().enumerate() {
                    let mode = (base + i + e) % m;
                    match (lo..=t_out).rev().find(|&t| occ.get(mode, t)) {
                        Some(t) => bins.push(t),
                        None => continue 'word,
                    }
                }
                // a window whose latest photon is earlier was already tried
                if bins.iter().all(|&t| t != t_out) {
                    continue;
                }
                let delays = bins.iter().map(|&t| t_out - t).collect();
                return Some(SpatioTemporalRoute { base, offsets: w.clone(), bins, delays, output_time: t_out });
            }
        }
    }
    None
}

/// Check a spatio-temporal witness against the occupancy and the network
/// limits.
pub fn replay_spatiotemporal(occ: &SpaceTimeOccupancy, route: &SpatioTemporalRoute, max_cross: usize, max_delay: usize) -> bool {
    let modes = route.modes(occ.modes);
    let n = modes.len();
    let distinct = modes.iter().enumerate().all(|(i, a)| !modes[..i].contains(a));
    distinct
        && route.offsets.contains(&0)
        && route.delays.contains(&0)
        && route.offsets.iter().all(|&e| e <= max_cross)
        && route.bins.len() == n
        && route.delays.len() == n
        && (0..n).all(|i| {
            route.delays[i] <= max_delay && occ.get(modes[i], route.bins[i]) && route.bins[i] + route.delays[i] == route.output_time
        })
}

/// Extract up to `max_groups` disjoint groups, removing used photons after
/// each.
pub fn extract_groups(
    occ: &SpaceTimeOccupancy,
    n: usize,
    max_cross: usize,
    max_delay: usize,
    max_groups: usize,
) -> Result<Vec<SpatioTemporalRoute>> {
    let words = crossing_words(occ.modes, n, max_cross)?;
    let mut occ = occ.clone();
    let mut out = Vec::new();
    while out.len() < max_groups {
        let Some(r) = route_with_words(&occ, n, max_delay, &words) else { break };
        for (mode, &t) in r.modes(occ.modes).into_iter().zip(&r.bins) {
            occ.set(mode, t, false);
        }
        out.push(r);
    }
    Ok(out)
}

/// `P[at least k groups]` for `k = 1..=max_groups` from a batch of
/// `m × b` Bernoulli(p) source events.
#[allow(clippy::too_many_arguments)]
pub fn spatiotemporal_group_probabilities(
    modes: usize,
    bins: usize,
    n: usize,
    max_cross: usize,
    max_delay: usize,
    max_groups: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    use rand::Rng;
    let words = crossing_words(modes, n, max_cross)?;
    SpaceTimeOccupancy::new(modes, bins)?;
    estimate_many(trials, seed, max_groups, |rng, _, out| {
        let mut occ = SpaceTimeOccupancy::new(modes, bins).expect("checked");
        for t in 0..bins {
            for j in 0..modes {
                if rng.gen::<f64>() < p {
                    occ.set(j, t, true);
                }
            }
        }
        let mut found = 0;
        while found < max_groups {
            let Some(r) = route_with_words(&occ, n, max_delay, &words) else { break };
            for (mode, &t) in r.modes(modes).into_iter().zip(&r.bins) {
                occ.set(mode, t, false);
            }
            found += 1;
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o = (found > k) as u8 as f64;
        }
    })
}
