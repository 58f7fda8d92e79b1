//! Rearranging the four rails of a Bell state into four disjoint mode sets
//! with one layer of MZIs.
//!
//! MZI types A/B/C/D carry output labels (1,2)/(2,3)/(3,4)/(4,1); a block is
//! one MZI of each type on eight consecutive modes.  A rail configuration
//! succeeds when every rail can be sent to a distinct label.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::combinations;
use crate::error::{invalid, Result};

/// Exact non-negative rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1);
        Self { num: num / g, den: den / g }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RailBlocks {
    /// `n` blocks (8n output modes); every 4-subset of modes equally likely.
    Finite(usize),
    /// Rails land on distinct MZIs with independent uniform types.
    Asymptotic,
}

/// Labels (0-based) an MZI of type `t` can deliver to.
fn type_labels(t: usize) -> [usize; 2] {
    [t, (t + 1) % 4]
}

/// Distinct-label assignment exists for rails sitting on MZIs of the given
/// types.
fn assignable(types: &[usize]) -> bool {
    (0..1u32 << types.len()).any(|choice| {
        let mut used = 0u32;
        types.iter().enumerate().all(|(i, &t)| {
            let l = type_labels(t)[(choice >> i & 1) as usize];
            let fresh = used >> l & 1 == 0;
            used |= 1 << l;
            fresh
        })
    })
}

/// Fraction of Bell-state rail configurations the MZI layer can rearrange.
pub fn bell_rail_rearrange_fraction(blocks: RailBlocks) -> Result<Fraction> {
    match blocks {
        RailBlocks::Asymptotic => {
            let ok = (0..256usize).filter(|&c| assignable(&[c & 3, c >> 2 & 3, c >> 4 & 3, c >> 6 & 3])).count();
            Ok(Fraction::new(ok as u64, 256))
        }
        RailBlocks::Finite(n) => {
            if n == 0 || n > 8 {
                return invalid(format!("block count {n} must lie in 1..=8"));
            }
            let modes = 8 * n;
            let (mut ok, mut total) = (0u64, 0u64);
            for bits in combinations(modes, 4) {
                // MZI j on modes (2j, 2j+1) has type j mod 4; two rails on
                // the same MZI take both of its labels, which the distinct
                // assignment already forces.
                let types: Vec<usize> = (0..modes).filter(|m| bits >> m & 1 == 1).map(|m| (m / 2) % 4).collect();
                total += 1;
                if assignable(&types) {
                    ok += 1;
                }
            }
            Ok(Fraction::new(ok, total))
        }
    }
}

/// Probability that four rails fall into four distinct equal bins:
/// `3/4 · 2/4 · 1/4`.
pub fn binning_probability() -> Fraction {
    Fraction::new(3 * 2, 4 * 4 * 4)
}

/// The same probability by enumerating every bin assignment of `rails`
/// independent rails over `bins` bins.
pub fn binning_probability_enumerated(bins: u64, rails: u32) -> Result<Fraction> {
    if bins == 0 {
        return invalid("need at least one bin");
    }
    let total = bins.checked_pow(rails).filter(|&t| t <= 1 << 24).ok_or_else(|| crate::Error::InvalidArgument("too many assignments".into()))?;
    let ok = (0..total)
        .filter(|&code| {
            let mut c = code;
            let mut seen = 0u128;
            (0..rails).all(|_| {
                let b = c % bins;
                c /= bins;
                let fresh = seen >> b & 1 == 0;
                seen |= 1 << b;
                fresh
            })
        })
        .count();
    Ok(Fraction::new(ok as u64, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_distinct_types_succeed() {
        for perm in [[0, 1, 2, 3], [3, 1, 0, 2], [2, 3, 1, 0]] {
            assert!(assignable(&perm));
        }
        assert!(!assignable(&[0, 0, 0, 1]));
        assert!(!assignable(&[0, 0, 1, 1]));
        assert!(assignable(&[0, 0, 2, 2]));
        assert!(assignable(&[1, 1, 3, 3]));
        assert!(assignable(&[0, 1, 1, 3]));
    }

    #[test]
    fn finite_blocks_approach_the_limit() {
        let lim = bell_rail_rearrange_fraction(RailBlocks::Asymptotic).unwrap().value();
        let f: Vec<f64> = (1..=4).map(|b| bell_rail_rearrange_fraction(RailBlocks::Finite(b)).unwrap().value()).collect();
        assert!(f.windows(2).all(|w| w[0] > w[1]));
        assert!(f[3] > lim && f[3] - lim < 0.06);
        assert!(bell_rail_rearrange_fraction(RailBlocks::Finite(0)).is_err());
    }

    #[test]
    fn binning() {
        assert_eq!(binning_probability(), Fraction::new(9, 96));
        assert_eq!(binning_probability_enumerated(4, 4).unwrap(), binning_probability());
        assert_eq!(binning_probability_enumerated(1, 4).unwrap().num, 0);
        assert_eq!(binning_probability_enumerated(3, 1).unwrap(), Fraction::new(1, 1));
    }
}
