//! Two-layer grid muxes: layer-1 GMZIs permute photons within columns,
//! layer-2 GMZIs select one photon per row, and consecutive rows form the
//! output groups fed to each generator.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::yield_multi_generator;
use crate::error::{invalid, Result};
use crate::gmzi::GroupSpec;
use crate::simkit::{estimate_many, Estimate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSpec {
    /// Number of marked cells (the layer-2 GMZI size).
    pub size: usize,
    pub group: usize,
}

/// Grid notation for a two-layer mux.  `grid[r][c]` marks a mode shared by
/// column GMZI `c` and row GMZI `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMuxConfig {
    pub columns: Vec<usize>,
    pub rows: Vec<RowSpec>,
    pub grid: Vec<Vec<bool>>,
    pub group_size: usize,
    pub generators: usize,
}

impl GridMuxConfig {
    pub fn validate(&self) -> Result<()> {
        let (nr, nc) = (self.rows.len(), self.columns.len());
        if self.group_size == 0 || self.generators == 0 {
            return invalid("group size and generator count must be >= 1");
        }
        if nr != self.group_size * self.generators {
            return invalid(format!("{nr} rows cannot form {} groups of {}", self.generators, self.group_size));
        }
        if self.grid.len() != nr || self.grid.iter().any(|r| r.len() != nc) {
            return invalid("grid shape must be rows × columns");
        }
        for (r, spec) in self.rows.iter().enumerate() {
            if spec.group != r / self.group_size {
                return invalid(format!("row {r} must belong to group {}", r / self.group_size));
            }
            let marked = self.grid[r].iter().filter(|&&b| b).count();
            if marked != spec.size {
                return invalid(format!("row {r} has {marked} marked cells, size says {}", spec.size));
            }
        }
        for (c, &size) in self.columns.iter().enumerate() {
            let marked = (0..nr).filter(|&r| self.grid[r][c]).count();
            if marked != size {
                return invalid(format!("column {c} has {marked} marked cells, size says {size}"));
            }
            if size > 64 {
                return invalid(format!("column {c} larger than 64 modes"));
            }
        }
        Ok(())
    }

    /// Number of sources (marked cells).
    pub fn sources(&self) -> usize {
        self.columns.iter().sum()
    }

    pub fn groups(&self) -> usize {
        self.generators
    }

    /// Port of cell `(r, c)` within column `c`: its position among the
    /// column's marked rows.
    pub fn port(&self, r: usize, c: usize) -> Option<usize> {
        if !self.grid[r][c] {
            return None;
        }
        Some((0..r).filter(|&q| self.grid[q][c]).count())
    }

    /// Marked rows of column `c`, in port order.
    pub fn column_rows(&self, c: usize) -> Vec<usize> {
        (0..self.rows.len()).filter(|&r| self.grid[r][c]).collect()
    }
}

/// The 256-source mux: 16 columns of 16, twenty rows in five groups of
/// four with row sizes 16 (groups 0–2), 12, 12, 8, 8 and 8, 8, 4, 4.  The
/// short rows are laid out by wrapping around the columns so that every
/// column receives exactly four of them.
pub fn default_config() -> GridMuxConfig {
    let nc = 16;
    let sizes = [16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 12, 12, 8, 8, 8, 8, 4, 4];
    let mut grid = vec![vec![false; nc]; sizes.len()];
    let mut cursor = 0usize;
    for (r, &s) in sizes.iter().enumerate() {
        if s == nc {
            grid[r].iter_mut().for_each(|b| *b = true);
        } else {
            for _ in 0..s {
                grid[r][cursor % nc] = true;
                cursor += 1;
            }
        }
    }
    GridMuxConfig {
        columns: vec![16; nc],
        rows: sizes.iter().enumerate().map(|(r, &size)| RowSpec { size, group: r / 4 }).collect(),
        grid,
        group_size: 4,
        generators: 5,
    }
}

/// A fully connected `k × k` grid with groups of `m`, small enough to
/// check against exhaustive search.
pub fn full_config(k: usize, m: usize) -> Result<GridMuxConfig> {
    if k == 0 || m == 0 || k % m != 0 {
        return invalid(format!("group size {m} must divide grid size {k}"));
    }
    let cfg = GridMuxConfig {
        columns: vec![k; k],
        rows: (0..k).map(|r| RowSpec { size: k, group: r / m }).collect(),
        grid: vec![vec![true; k]; k],
        group_size: m,
        generators: k / m,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Photons per column as a port bit-mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub columns: Vec<u64>,
}

impl OccupancyGrid {
    pub fn empty(cfg: &GridMuxConfig) -> Self {
        Self { columns: vec![0; cfg.columns.len()] }
    }

    pub fn full(cfg: &GridMuxConfig) -> Self {
        Self { columns: cfg.columns.iter().map(|&s| if s == 64 { u64::MAX } else { (1u64 << s) - 1 }).collect() }
    }

    /// From a rows × columns boolean matrix; photons must sit on marked cells.
    pub fn from_cells(cfg: &GridMuxConfig, cells: &[Vec<bool>]) -> Result<Self> {
        if cells.len() != cfg.rows.len() || cells.iter().any(|r| r.len() != cfg.columns.len()) {
            return invalid("occupancy shape must match the grid");
        }
        let mut cols = vec![0u64; cfg.columns.len()];
        for (r, row) in cells.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                if b {
                    let port = cfg.port(r, c).ok_or_else(|| crate::Error::InvalidArgument(format!("photon on unmarked cell ({r}, {c})")))?;
                    cols[c] |= 1 << port;
                }
            }
        }
        Ok(Self { columns: cols })
    }

    pub fn photons(&self) -> u32 {
        self.columns.iter().map(|c| c.count_ones()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingOutcome {
    pub group_success: Vec<bool>,
    /// Layer-1 setting (group element) per column; 0 for unlocked columns.
    pub column_settings: Vec<usize>,
    pub column_locked: Vec<bool>,
    /// Column selected by each row's GMZI, for rows of successful groups.
    pub row_columns: Vec<Option<usize>>,
}

impl RoutingOutcome {
    pub fn successes(&self) -> usize {
        self.group_success.iter().filter(|&&b| b).count()
    }
}

/// Precomputed routing tables for one configuration and column type.
pub struct GridRouter {
    cfg: GridMuxConfig,
    /// `diff[t][x] = t − x`: both the input port that setting `x` sends to
    /// port `t` and the setting that sends port `x` to `t`.
    diff: Vec<Vec<usize>>,
    ports: Vec<Vec<Option<usize>>>,
}

impl GridRouter {
    pub fn new(cfg: &GridMuxConfig, column_type: &GroupSpec) -> Result<Self> {
        cfg.validate()?;
        let n = column_type.order();
        if let Some(&bad) = cfg.columns.iter().find(|&&s| s != n) {
            return invalid(format!("column of size {bad} does not match GMZI type {column_type} of order {n}"));
        }
        let diff = (0..n).map(|t| (0..n).map(|k| column_type.difference(t, k)).collect()).collect();
        let ports = (0..cfg.rows.len()).map(|r| (0..cfg.columns.len()).map(|c| cfg.port(r, c)).collect()).collect();
        Ok(Self { cfg: cfg.clone(), diff, ports })
    }

    pub fn config(&self) -> &GridMuxConfig {
        &self.cfg
    }

    /// The nested-loop lock/unlock routing.  Columns are scanned in
    /// ascending order; an unlocked column is set to send its lowest
    /// occupied port into the row.  Temporary locks are released when a
    /// group fails and made permanent when it succeeds.
    pub fn route(&self, occ: &OccupancyGrid) -> Result<RoutingOutcome> {
        let nc = self.cfg.columns.len();
        if occ.columns.len() != nc {
            return invalid("occupancy has the wrong number of columns");
        }
        for (c, &bits) in occ.columns.iter().enumerate() {
            let s = self.cfg.columns[c];
            if s < 64 && bits >> s != 0 {
                return invalid(format!("column {c} occupancy exceeds its {s} ports"));
            }
        }
        #[derive(Clone, Copy, PartialEq)]
        enum Lock {
            Free,
            Temp,
            Held,
        }
        let mut lock = vec![Lock::Free; nc];
        let mut setting = vec![0usize; nc];
        let mut row_columns = vec![None; self.cfg.rows.len()];
        let mut group_success = Vec::with_capacity(self.cfg.generators);
        let m = self.cfg.group_size;
        for g in 0..self.cfg.generators {
            let mut temp = Vec::new();
            let mut picks = Vec::with_capacity(m);
            let mut ok = true;
            for r in g * m..(g + 1) * m {
                let mut found = None;
                for c in 0..nc {
                    let Some(t) = self.ports[r][c] else { continue };
                    match lock[c] {
                        Lock::Temp | Lock::Held => {
                            if occ.columns[c] >> self.diff[t][setting[c]] & 1 == 1 {
                                found = Some(c);
                            }
                        }
                        Lock::Free => {
                            if occ.columns[c] != 0 {
                                let s = occ.columns[c].trailing_zeros() as usize;
                                setting[c] = self.diff[t][s];
                                lock[c] = Lock::Temp;
                                temp.push(c);
                                found = Some(c);
                            }
                        }
                    }
                    if found.is_some() {
                        break;
                    }
                }
                match found {
                    Some(c) => picks.push((r, c)),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for c in temp {
                    lock[c] = Lock::Held;
                }
                for (r, c) in picks {
                    row_columns[r] = Some(c);
                }
            } else {
                for c in temp {
                    lock[c] = Lock::Free;
                    setting[c] = 0;
                }
            }
            group_success.push(ok);
        }
        Ok(RoutingOutcome {
            group_success,
            column_settings: setting,
            column_locked: lock.iter().map(|&l| l == Lock::Held).collect(),
            row_columns,
        })
    }

    /// Check that the emitted settings place a photon at every claimed row.
    pub fn replay(&self, occ: &OccupancyGrid, out: &RoutingOutcome) -> bool {
        let m = self.cfg.group_size;
        for (g, &ok) in out.group_success.iter().enumerate() {
            for r in g * m..(g + 1) * m {
                match (ok, out.row_columns[r]) {
                    (true, Some(c)) => {
                        let Some(t) = self.ports[r][c] else { return false };
                        if !out.column_locked[c] || occ.columns[c] >> self.diff[t][out.column_settings[c]] & 1 == 0 {
                            return false;
                        }
                    }
                    (false, None) => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Largest number of groups any choice of column settings can fill at
    /// once (exhaustive; small grids only).
    pub fn brute_force_max_groups(&self, occ: &OccupancyGrid) -> Result<usize> {
        let nc = self.cfg.columns.len();
        let n = self.diff.len();
        let total = (n as f64).powi(nc as i32);
        if total > 1e6 {
            return Err(crate::Error::SearchSpace { size: total, limit: 1e6 });
        }
        let m = self.cfg.group_size;
        let mut best = 0;
        let mut ks = vec![0usize; nc];
        loop {
            let filled = |r: usize| (0..nc).any(|c| self.ports[r][c].is_some_and(|t| occ.columns[c] >> self.diff[t][ks[c]] & 1 == 1));
            let groups = (0..self.cfg.generators).filter(|&g| (g * m..(g + 1) * m).all(filled)).count();
            best = best.max(groups);
            // odometer
            let mut i = 0;
            while i < nc {
                ks[i] += 1;
                if ks[i] < n {
                    break;
                }
                ks[i] = 0;
                i += 1;
            }
            if i == nc {
                break;
            }
        }
        Ok(best)
    }

    /// Sample an occupancy with independent Bernoulli(p) cells.
    pub fn sample<R: Rng>(&self, rng: &mut R, p: f64) -> OccupancyGrid {
        OccupancyGrid {
            columns: self
                .cfg
                .columns
                .iter()
                .map(|&s| (0..s).filter(|_| rng.gen::<f64>() < p).fold(0u64, |a, i| a | 1 << i))
                .collect(),
        }
    }
}

/// Result of a yield simulation at one source probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridYieldPoint {
    pub p: f64,
    pub yield_estimate: Estimate,
    /// Mean number of successful groups per trial.
    pub groups: Estimate,
    pub bound: f64,
    pub naive: f64,
}

/// Monte-Carlo yield `m · successes / (N p)` (photons delivered in
/// complete groups over expected photons heralded).
pub fn simulate_grid_yield(router: &GridRouter, p: f64, trials: u64, seed: u64) -> Result<GridYieldPoint> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    let cfg = router.config();
    let n = cfg.sources() as f64;
    let m = cfg.group_size as f64;
    let est = estimate_many(trials, seed, 1, |rng, _, out| {
        let occ = router.sample(rng, p);
        out[0] = router.route(&occ).map(|o| o.successes() as f64).unwrap_or(f64::NAN);
    })?;
    let groups = est[0];
    let yield_estimate = if p == 0.0 { groups.scaled(0.0) } else { groups.scaled(m / (n * p)) };
    Ok(GridYieldPoint { p, yield_estimate, groups, bound: bound_curve(cfg, p)?, naive: naive_yield(cfg.sources() as u64, p, cfg.group_size as u64)? })
}

/// Sharing bound for the same sources and generators.
pub fn bound_curve(cfg: &GridMuxConfig, p: f64) -> Result<f64> {
    if p == 0.0 {
        return Ok(0.0);
    }
    yield_multi_generator(cfg.sources() as f64 * p, cfg.group_size as u64, cfg.generators as u64, true)
}

/// One generator fed by `m` separate `N/m`-to-1 muxes.
pub fn naive_yield(n: u64, p: f64, m: u64) -> Result<f64> {
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(m as f64 * crate::analytics::naive_group_pmux(n, p, m)? / (n as f64 * p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout_counts() {
        let cfg = default_config();
        cfg.validate().unwrap();
        assert_eq!(cfg.sources(), 256);
        assert_eq!(cfg.rows.len(), 20);
        assert_eq!(cfg.groups(), 5);
        let mut sizes: Vec<usize> = cfg.rows.iter().map(|r| r.size).collect();
        sizes.dedup();
        assert_eq!(sizes, vec![16, 12, 8, 4]);
    }

    #[test]
    fn validation_catches_bad_grids() {
        let mut cfg = full_config(4, 2).unwrap();
        cfg.rows[0].size = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = full_config(4, 2).unwrap();
        cfg.rows[1].group = 1;
        assert!(cfg.validate().is_err());
        assert!(full_config(4, 3).is_err());
    }

    #[test]
    fn extreme_occupancies() {
        let cfg = default_config();
        let r = GridRouter::new(&cfg, &GroupSpec::hadamard(4)).unwrap();
        let empty = r.route(&OccupancyGrid::empty(&cfg)).unwrap();
        assert_eq!(empty.successes(), 0);
        let full = OccupancyGrid::full(&cfg);
        let out = r.route(&full).unwrap();
        assert_eq!(out.successes(), 5);
        assert!(r.replay(&full, &out));
    }

    #[test]
    fn column_type_must_match() {
        assert!(GridRouter::new(&default_config(), &GroupSpec::hadamard(3)).is_err());
        assert!(GridRouter::new(&default_config(), &GroupSpec::cyclic(16)).is_ok());
    }

    #[test]
    fn saturated_yield() {
        let cfg = default_config();
        let r = GridRouter::new(&cfg, &GroupSpec::hadamard(4)).unwrap();
        let pt = simulate_grid_yield(&r, 1.0, 16, 1).unwrap();
        assert_eq!(pt.yield_estimate.mean, 20.0 / 256.0);
        assert_eq!(simulate_grid_yield(&r, 0.0, 16, 1).unwrap().yield_estimate.mean, 0.0);
        assert!((pt.bound - 20.0 / 256.0).abs() < 1e-12);
    }
}
