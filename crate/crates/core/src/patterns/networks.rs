//! Two-layer networks that send any pattern of four (six) photons to one
//! photon per labelled output set.
//!
//! Four photons, `4b` modes: layer-1 MZIs on `(2i, 2i+1)`; in block `b` the
//! even outputs `4b`, `4b+2` meet in a layer-2 MZI labelled {1, 4} and the
//! odd outputs `4b+1`, `4b+3` in one labelled {2, 3}.
//!
//! Six photons, `6b` modes: three-mode cyclic GMZIs on `(3i..3i+3)`; output
//! `j` of GMZIs `2b` and `2b+1` meets in a layer-2 MZI labelled
//! {j+1, j+4}.

use serde::Serialize;

use super::PhotonPattern;
use crate::error::{invalid, Error, Result};

/// Settings for the four-photon network.  `labels[i]` is the output label
/// (1..=4) that the photon at `inputs[i]` reaches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoLayerRoute {
    pub layer1: Vec<bool>,
    pub layer2: Vec<bool>,
    pub inputs: Vec<usize>,
    pub labels: Vec<u8>,
}

fn check_four(modes: usize, pattern: &PhotonPattern) -> Result<()> {
    if modes == 0 || modes % 4 != 0 || modes > 64 {
        return invalid(format!("network size {modes} must be a positive multiple of 4, at most 64"));
    }
    if pattern.modes() != modes {
        return invalid(format!("pattern is over {} modes, network has {modes}", pattern.modes()));
    }
    if pattern.photons() != 4 {
        return invalid(format!("expected 4 photons, got {}", pattern.photons()));
    }
    Ok(())
}

/// Layer-2 MZI index and port for layer-1 output `o`: MZIs `2b` (even side)
/// and `2b+1` (odd side); port 0 is the lower mode.
fn layer2_slot(o: usize) -> (usize, usize) {
    let b = o / 4;
    let r = o % 4;
    (2 * b + (r & 1), r >> 1)
}

const LABELS_EVEN: [u8; 2] = [1, 4];
const LABELS_ODD: [u8; 2] = [2, 3];

/// Propagate every photon through the four-photon network.  Returns the
/// label each input photon reaches, or `None` if two photons meet the same
/// label.
pub fn replay_two_layer_four(_modes: usize, pattern: &PhotonPattern, layer1: &[bool], layer2: &[bool]) -> Option<Vec<u8>> {
    replay_four(&pattern.occupied(), |i| layer1[i], |z| layer2[z])
}

fn replay_four(occ: &[usize], layer1: impl Fn(usize) -> bool, layer2: impl Fn(usize) -> bool) -> Option<Vec<u8>> {
    let mut seen = [false; 5];
    let mut out = Vec::with_capacity(4);
    for &m in occ {
        let o = if layer1(m / 2) { m ^ 1 } else { m };
        let (z, port) = layer2_slot(o);
        let port = if layer2(z) { port ^ 1 } else { port };
        let lab = if z % 2 == 0 { LABELS_EVEN[port] } else { LABELS_ODD[port] };
        if seen[lab as usize] {
            return None;
        }
        seen[lab as usize] = true;
        out.push(lab);
    }
    Some(out)
}

/// Route four photons to labels 1–4.
///
/// Layer 1 sends exactly two photons to the even side: a doubly-occupied
/// MZI necessarily puts one photon on each side, so single photons fill the
/// remaining even slots in mode order.  Layer 2 then splits each side's two
/// photons across its two labels.
pub fn route_two_layer_four(modes: usize, pattern: &PhotonPattern) -> Result<TwoLayerRoute> {
    check_four(modes, pattern)?;
    let occ = pattern.occupied();
    let mzis = modes / 2;
    let mut layer1 = vec![false; mzis];
    let doubles = (0..mzis).filter(|&i| pattern.contains(2 * i) && pattern.contains(2 * i + 1)).count();
    let mut even_needed = 2 - doubles;
    for i in 0..mzis {
        let (a, b) = (pattern.contains(2 * i), pattern.contains(2 * i + 1));
        if a != b {
            let want_even = even_needed > 0;
            if want_even {
                even_needed -= 1;
            }
            // photon currently on the even mode iff `a`
            layer1[i] = a != want_even;
        }
    }
    // layer 2: the first photon seen on each side takes the side's first
    // free label; an MZI holding two photons is left in the bar state.
    let mut layer2 = vec![false; mzis];
    let mut used = [[false; 2]; 2];
    let mut outs: Vec<usize> = occ.iter().map(|&m| if layer1[m / 2] { m ^ 1 } else { m }).collect();
    outs.sort_unstable();
    let mut handled = vec![false; mzis];
    for &o in &outs {
        let (z, port) = layer2_slot(o);
        if handled[z] {
            continue;
        }
        handled[z] = true;
        let side = z % 2;
        let partner = o ^ 2;
        if outs.contains(&partner) {
            used[side] = [true, true];
            continue;
        }
        let target = if !used[side][0] { 0 } else { 1 };
        used[side][target] = true;
        layer2[z] = port != target;
    }
    let labels = replay_two_layer_four(modes, pattern, &layer1, &layer2)
        .ok_or_else(|| Error::Internal(format!("routing replay failed for {pattern}")))?;
    Ok(TwoLayerRoute { layer1, layer2, inputs: occ, labels })
}

/// Whether any of the `2^(modes/2) · 2^(modes/2)` settings routes the
/// pattern.  Independent check on [`route_two_layer_four`].
pub fn brute_force_two_layer_four(modes: usize, pattern: &PhotonPattern) -> Result<bool> {
    check_four(modes, pattern)?;
    let mzis = modes / 2;
    if mzis > 12 {
        return Err(Error::SearchSpace { size: 4f64.powi(mzis as i32), limit: 4f64.powi(12) });
    }
    let occ = pattern.occupied();
    for m1 in 0..1u32 << mzis {
        for m2 in 0..1u32 << mzis {
            if replay_four(&occ, |i| m1 >> i & 1 == 1, |z| m2 >> z & 1 == 1).is_some() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Settings for the six-photon network: cyclic shift per GMZI, swap bit per
/// layer-2 MZI (indexed `3b + j`), and the label reached by each photon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GmziSixRoute {
    pub shifts: Vec<u8>,
    pub layer2: Vec<bool>,
    pub inputs: Vec<usize>,
    pub labels: Vec<u8>,
}

fn check_six(modes: usize, pattern: &PhotonPattern) -> Result<()> {
    if modes == 0 || modes % 6 != 0 || modes > 60 {
        return invalid(format!("network size {modes} must be a positive multiple of 6, at most 60"));
    }
    if pattern.modes() != modes {
        return invalid(format!("pattern is over {} modes, network has {modes}", pattern.modes()));
    }
    if pattern.photons() != 6 {
        return invalid(format!("expected 6 photons, got {}", pattern.photons()));
    }
    Ok(())
}

/// Propagate photons through the six-photon network.
pub fn replay_gmzi3_layer_six(pattern: &PhotonPattern, shifts: &[u8], layer2: &[bool]) -> Option<Vec<u8>> {
    let mut seen = [false; 7];
    let mut out = Vec::new();
    for m in pattern.occupied() {
        let g = m / 3;
        let class = (m % 3 + shifts[g] as usize) % 3;
        let block = g / 2;
        let port = (g % 2) ^ layer2[3 * block + class] as usize;
        let lab = (class + 1 + 3 * port) as u8;
        if seen[lab as usize] {
            return None;
        }
        seen[lab as usize] = true;
        out.push(lab);
    }
    Some(out)
}

/// Route six photons to labels 1–6.
///
/// The GMZIs send two photons into each class {1,4}, {2,5}, {3,6}: GMZIs
/// are taken in order of decreasing photon count, and each sends its
/// photons to the classes with the largest remaining demand.  A GMZI with
/// three photons covers every class whatever its setting.
pub fn route_gmzi3_layer_six(modes: usize, pattern: &PhotonPattern) -> Result<GmziSixRoute> {
    check_six(modes, pattern)?;
    let gmzis = modes / 3;
    let ports: Vec<Vec<usize>> = (0..gmzis).map(|g| (0..3).filter(|&t| pattern.contains(3 * g + t)).collect()).collect();
    let mut order: Vec<usize> = (0..gmzis).collect();
    order.sort_by_key(|&g| std::cmp::Reverse(ports[g].len()));
    let mut demand = [2i32; 3];
    let mut shifts = vec![0u8; gmzis];
    for &g in &order {
        let p = &ports[g];
        if p.is_empty() {
            continue;
        }
        let mut best: Option<(i32, u8)> = None;
        for s in 0..3u8 {
            // prefer shifts whose classes all have demand, then total demand
            let classes = p.iter().map(|&t| (t + s as usize) % 3);
            let score: i32 = classes.map(|c| if demand[c] > 0 { 4 + demand[c] } else { -100 }).sum();
            if best.map_or(true, |(b, _)| score > b) {
                best = Some((score, s));
            }
        }
        let s = best.expect("three candidate shifts").1;
        shifts[g] = s;
        for &t in p {
            demand[(t + s as usize) % 3] -= 1;
        }
    }
    if demand != [0, 0, 0] {
        return Err(Error::Internal(format!("class assignment failed for {pattern}")));
    }
    let blocks = gmzis / 2;
    let mut layer2 = vec![false; 3 * blocks];
    let mut taken = [[false; 2]; 3];
    for b in 0..blocks {
        for c in 0..3 {
            let here: Vec<usize> = (0..2)
                .filter(|&h| ports[2 * b + h].iter().any(|&t| (t + shifts[2 * b + h] as usize) % 3 == c))
                .collect();
            match here.len() {
                2 => taken[c] = [true, true],
                1 => {
                    let target = if !taken[c][0] { 0 } else { 1 };
                    taken[c][target] = true;
                    layer2[3 * b + c] = here[0] != target;
                }
                _ => {}
            }
        }
    }
    let labels = replay_gmzi3_layer_six(pattern, &shifts, &layer2)
        .ok_or_else(|| Error::Internal(format!("routing replay failed for {pattern}")))?;
    Ok(GmziSixRoute { shifts, layer2, inputs: pattern.occupied(), labels })
}
