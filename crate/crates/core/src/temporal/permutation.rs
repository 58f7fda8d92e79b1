//! Permutation networks built from two cyclic GMZIs and rastered delays.
//!
//! The `R` synchronous inputs are first spread over `R` bins (input `i`
//! delayed by `i`), so each GMZI sees at most one photon per bin and can be
//! set independently for it.  GMZI 1 sends input `i` to the delay line
//! `q`, which delays by `q`; GMZI 2 sends line `q` to the target output.
//!
//! * sort-to-top: size `R`, delays `0..R`, the `k`-th occupied input goes
//!   to output `k`;
//! * arbitrary: size `2R−1`, delays `0..2R−1`, input `i` goes to
//!   `perm[i]`, and a final delay `R−1−perm[i]` puts every output in the
//!   last bin of the `2R−1` window whatever the permutation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationVariant {
    SortToTop,
    Arbitrary,
}

impl std::str::FromStr for PermutationVariant {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sort-to-top" => Ok(Self::SortToTop),
            "arbitrary" => Ok(Self::Arbitrary),
            _ => invalid(format!("unknown permutation variant '{s}' (sort-to-top, arbitrary)")),
        }
    }
}

/// Per-bin cyclic-shift settings of both GMZIs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSchedule {
    pub variant: PermutationVariant,
    pub inputs: usize,
    /// GMZI size.
    pub size: usize,
    /// Delay of line `q` is `q`.
    pub delays: Vec<usize>,
    /// `gmzi1[t]`: shift applied in bin `t` (port `j → j + s mod size`).
    pub gmzi1: Vec<Option<usize>>,
    pub gmzi2: Vec<Option<usize>>,
    /// Delay after GMZI 2 on each output (arbitrary variant only).
    pub output_delays: Vec<usize>,
    /// Requested output per input (`None` for empty inputs).
    pub targets: Vec<Option<usize>>,
}

fn shift(from: usize, to: usize, n: usize) -> usize {
    (to + n - from) % n
}

fn build(variant: PermutationVariant, r: usize, targets: Vec<Option<usize>>) -> PermutationSchedule {
    let size = match variant {
        PermutationVariant::SortToTop => r,
        PermutationVariant::Arbitrary => 2 * r - 1,
    };
    // bins: inputs reach GMZI 1 in 0..R, GMZI 2 in R−1..2R−1
    let horizon = 2 * r - 1;
    let mut gmzi1 = vec![None; horizon];
    let mut gmzi2 = vec![None; horizon];
    for (i, t) in targets.iter().enumerate() {
        if let Some(o) = *t {
            let q = o + r - 1 - i;
            gmzi1[i] = Some(shift(i, q, size));
            gmzi2[i + q] = Some(shift(q, o, size));
        }
    }
    let output_delays = match variant {
        PermutationVariant::SortToTop => vec![0; r],
        PermutationVariant::Arbitrary => (0..r).map(|o| r - 1 - o).collect(),
    };
    PermutationSchedule { variant, inputs: r, size, delays: (0..size).collect(), gmzi1, gmzi2, output_delays, targets }
}

/// Schedule realising `perm` (arbitrary) on all `R` inputs.
pub fn temporal_permutation(perm: &[usize]) -> Result<PermutationSchedule> {
    let r = perm.len();
    if r == 0 {
        return invalid("permutation must have at least one element");
    }
    let mut seen = vec![false; r];
    for &o in perm {
        if o >= r || std::mem::replace(&mut seen[o], true) {
            return invalid(format!("{perm:?} is not a permutation of 0..{r}"));
        }
    }
    Ok(build(PermutationVariant::Arbitrary, r, perm.iter().map(|&o| Some(o)).collect()))
}

/// Schedule packing the occupied inputs onto outputs `0, 1, …` in order.
pub fn sort_to_top(occupied: &[bool]) -> Result<PermutationSchedule> {
    let r = occupied.len();
    if r == 0 {
        return invalid("need at least one input");
    }
    let mut k = 0;
    let targets = occupied
        .iter()
        .map(|&o| {
            o.then(|| {
                k += 1;
                k - 1
            })
        })
        .collect();
    Ok(build(PermutationVariant::SortToTop, r, targets))
}

/// A photon leaving the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrival {
    pub input: usize,
    pub output: usize,
    pub time: usize,
}

/// Discrete-event replay of a schedule on photons at the given inputs (all
/// arriving in bin 0).  Fails if a GMZI is asked to switch a photon in a
/// bin without a setting, two photons share a port in one bin, or a
/// photon leaves on a port that is not an output.
pub fn replay_permutation(s: &PermutationSchedule, occupied: &[bool]) -> Result<Vec<Arrival>> {
    if occupied.len() != s.inputs {
        return invalid(format!("schedule has {} inputs, got {}", s.inputs, occupied.len()));
    }
    let n = s.size;
    let mut stage1: Vec<(usize, usize, usize)> = Vec::new(); // (time, line, input)
    for (i, _) in occupied.iter().enumerate().filter(|(_, &o)| o) {
        let t = i; // spreading delay
        let Some(k) = s.gmzi1.get(t).copied().flatten() else {
            return invalid(format!("GMZI 1 has no setting in bin {t}"));
        };
        stage1.push((t, (i + k) % n, i));
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for &(t, q, i) in &stage1 {
        let t2 = t + s.delays[q];
        let Some(k) = s.gmzi2.get(t2).copied().flatten() else {
            return invalid(format!("GMZI 2 has no setting in bin {t2}"));
        };
        if !seen.insert((t2, q)) {
            return invalid(format!("two photons on line {q} in bin {t2}"));
        }
        let o = (q + k) % n;
        if o >= s.inputs {
            return invalid(format!("photon from input {i} leaves on unused port {o}"));
        }
        out.push(Arrival { input: i, output: o, time: t2 + s.output_delays[o] });
    }
    // one photon per GMZI-2 bin means one per output
    let mut outs: Vec<usize> = out.iter().map(|a| a.output).collect();
    outs.sort_unstable();
    if outs.windows(2).any(|w| w[0] == w[1]) {
        return invalid("two photons reached the same output");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_reversal() {
        for perm in [vec![0, 1, 2], vec![2, 1, 0]] {
            let s = temporal_permutation(&perm).unwrap();
            assert_eq!(s.size, 5);
            let a = replay_permutation(&s, &[true; 3]).unwrap();
            assert!(a.iter().all(|x| x.output == perm[x.input] && x.time == 4));
        }
        assert!(temporal_permutation(&[0, 0, 1]).is_err());
        assert!(temporal_permutation(&[]).is_err());
    }

    #[test]
    fn sort_to_top_example() {
        let occ = [false, false, true, false, true];
        let s = sort_to_top(&occ).unwrap();
        assert_eq!(s.size, 5);
        assert_eq!(*s.delays.last().unwrap(), 4);
        let mut a = replay_permutation(&s, &occ).unwrap();
        a.sort_by_key(|x| x.output);
        assert_eq!(a.iter().map(|x| (x.input, x.output)).collect::<Vec<_>>(), vec![(2, 0), (4, 1)]);
    }
}
