//! Feed-forward routing logic as truth tables.
//!
//! Bit `i` of an input word is port `i`; port 0 is the top port and has the
//! highest priority.  Patterns are written left to right from port 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::patterns::{MziLayerConfig, PhotonPattern};

/// Lowest set port, if any.
pub fn priority_encode(bits: u64) -> Option<usize> {
    (bits != 0).then(|| bits.trailing_zeros() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trit {
    Zero,
    One,
    Any,
}

impl Trit {
    pub fn symbol(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::Any => '*',
        }
    }
}

/// One table entry: an input pattern over `{0, 1, *}` and its outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub pattern: Vec<Trit>,
    pub outputs: Vec<bool>,
}

impl TruthRow {
    pub fn matches(&self, input: u64) -> bool {
        self.pattern.iter().enumerate().all(|(i, t)| match t {
            Trit::Any => true,
            Trit::One => input >> i & 1 == 1,
            Trit::Zero => input >> i & 1 == 0,
        })
    }

    pub fn pattern_string(&self) -> String {
        self.pattern.iter().map(|t| t.symbol()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    pub width: usize,
    /// Names of the output bits, in order.
    pub output_names: Vec<String>,
    pub rows: Vec<TruthRow>,
    /// Outputs for inputs that match no row.
    pub default_outputs: Vec<bool>,
}

impl TruthTable {
    /// Outputs for `input`: the first matching row, else the defaults.
    pub fn lookup(&self, input: u64) -> &[bool] {
        self.rows.iter().find(|r| r.matches(input)).map_or(&self.default_outputs, |r| &r.outputs)
    }

    pub fn matching_rows(&self, input: u64) -> usize {
        self.rows.iter().filter(|r| r.matches(input)).count()
    }

    /// Exhaustive sweep: no input matches two rows with different outputs.
    pub fn is_conflict_free(&self) -> Result<bool> {
        self.sweep_guard()?;
        Ok((0..1u64 << self.width).all(|x| {
            let mut hits = self.rows.iter().filter(|r| r.matches(x));
            match hits.next() {
                None => true,
                Some(first) => hits.all(|r| r.outputs == first.outputs),
            }
        }))
    }

    fn sweep_guard(&self) -> Result<()> {
        if self.width > 24 {
            return Err(Error::SearchSpace { size: 2f64.powi(self.width as i32), limit: 2f64.powi(24) });
        }
        Ok(())
    }

    /// Header and records for CSV export: the pattern, then one column per
    /// output bit, then a final `default` row.
    pub fn records(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header = vec!["pattern".to_string()];
        header.extend(self.output_names.iter().cloned());
        let bit = |b: &bool| if *b { "1" } else { "0" }.to_string();
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| std::iter::once(r.pattern_string()).chain(r.outputs.iter().map(bit)).collect())
            .collect();
        rows.push(std::iter::once("default".to_string()).chain(self.default_outputs.iter().map(bit)).collect());
        (header, rows)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let out: String = r.outputs.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(f, "{} -> {out}", r.pattern_string())?;
        }
        Ok(())
    }
}

/// Wildcard-reduced table for selecting `n` photons from `width` ports.
///
/// Each row is an exactly-`n`-ones pattern with every position after its
/// last one replaced by `*`; inputs with more photons therefore match the
/// row of their first `n` photons.  `outputs_for` receives those `n`
/// positions and returns the routing bits, or `None` to leave the pattern
/// to the defaults.  One blocking bit per port is appended, set for the
/// wildcarded ports, so surplus photons can be dumped.
pub fn wildcard_reduce<F>(width: usize, n: usize, mut outputs_for: F) -> Result<TruthTable>
where
    F: FnMut(&[usize]) -> Option<Vec<bool>>,
{
    if width > 64 {
        return invalid(format!("input width {width} exceeds 64"));
    }
    if n > width {
        return invalid(format!("cannot select {n} photons from {width} ports"));
    }
    let mut rows = Vec::new();
    let mut routing_width = None;
    for bits in PhotonPattern::all_with(width, n as u32) {
        let ones = bits.occupied();
        let Some(mut outputs) = outputs_for(&ones) else { continue };
        match routing_width {
            None => routing_width = Some(outputs.len()),
            Some(w) if w != outputs.len() => return invalid("outputs_for returned rows of different widths"),
            _ => {}
        }
        let last = ones.last().map_or(0, |&l| l + 1);
        let pattern = (0..width)
            .map(|i| if i >= last { Trit::Any } else if bits.contains(i) { Trit::One } else { Trit::Zero })
            .collect();
        outputs.extend((0..width).map(|i| i >= last));
        rows.push(TruthRow { pattern, outputs });
    }
    let rw = routing_width.unwrap_or(0);
    let mut output_names: Vec<String> = (0..rw).map(|i| format!("route{i}")).collect();
    output_names.extend((0..width).map(|i| format!("block{i}")));
    Ok(TruthTable { width, output_names, rows, default_outputs: vec![false; rw + width] })
}

/// Number of rows `C(width, n)` of the full wildcard table, against
/// `2^width` fully specified inputs.
pub fn wildcard_row_count(width: u64, n: u64) -> (u128, u128) {
    (crate::analytics::choose(width, n), 1u128 << width)
}

/// Routing table for an MZI layer in front of a generator: rows for the
/// routable `photons`-photon patterns, outputs the MZI cross/bar bits of
/// the first witness.
pub fn layer_routing_table(layer: &MziLayerConfig, photons: usize, usable: &[PhotonPattern]) -> Result<TruthTable> {
    let report = crate::patterns::layer_coverage(layer, photons as u32, usable)?;
    let witness: std::collections::HashMap<u64, u64> = report.witnesses.iter().map(|(p, m)| (p.bits(), *m)).collect();
    let mzis = layer.pairs.len();
    let mut t = wildcard_reduce(layer.modes, photons, |ones| {
        let bits = ones.iter().fold(0u64, |a, &i| a | 1 << i);
        witness.get(&bits).map(|&mask| (0..mzis).map(|j| mask >> j & 1 == 1).collect())
    })?;
    if !t.rows.is_empty() {
        for (j, (a, b)) in layer.pairs.iter().enumerate() {
            t.output_names[j] = format!("mzi{a}_{b}");
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority() {
        assert_eq!(priority_encode(0), None);
        assert_eq!(priority_encode(0b1010), Some(1));
        assert_eq!(priority_encode(1 << 63), Some(63));
    }

    #[test]
    fn small_table() {
        let t = wildcard_reduce(4, 2, |_| Some(vec![])).unwrap();
        assert_eq!(t.rows.len(), 6);
        let pats: Vec<String> = t.rows.iter().map(|r| r.pattern_string()).collect();
        assert!(pats.contains(&"11**".to_string()) && pats.contains(&"0011".to_string()) && pats.contains(&"101*".to_string()));
        assert!(t.is_conflict_free().unwrap());
        // 1110 selects ports 0, 1 and blocks 2, 3
        assert_eq!(t.lookup(0b0111), &[false, false, true, true]);
        assert_eq!(t.lookup(0b0001), &t.default_outputs[..]);
    }

    #[test]
    fn zero_photons() {
        let t = wildcard_reduce(5, 0, |_| Some(vec![true])).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].pattern_string(), "*****");
        assert!(wildcard_reduce(3, 4, |_| Some(vec![])).is_err());
    }

    #[test]
    fn csv_records() {
        let t = wildcard_reduce(3, 1, |o| Some(vec![o[0] == 0])).unwrap();
        let (h, rows) = t.records();
        assert_eq!(h, vec!["pattern", "route0", "block0", "block1", "block2"]);
        assert_eq!(rows[0], vec!["1**", "1", "0", "1", "1"]);
        assert_eq!(rows.last().unwrap()[0], "default");
    }
}
