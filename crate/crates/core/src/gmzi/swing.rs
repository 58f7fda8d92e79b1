use std::f64::consts::PI;

use serde::Serialize;

use super::device::{build_gmzi, GmziDevice};
use super::group::GroupSpec;
use crate::linalg::PhaseVector;

/// Per-shifter range of active phases over the chosen settings, maximised
/// over shifters.  `restrict_to = None` means all settings.
pub fn phase_swing(dev: &GmziDevice, restrict_to: Option<&[usize]>) -> f64 {
    let all: Vec<usize> = (0..dev.settings_count()).collect();
    let settings = restrict_to.unwrap_or(&all);
    let active: Vec<PhaseVector> = settings.iter().map(|&k| dev.active_phases(k)).collect();
    per_shifter_swing(&active).into_iter().fold(0.0, f64::max)
}

/// Range of each shifter's phase across a list of phase vectors.
pub fn per_shifter_swing(vectors: &[PhaseVector]) -> Vec<f64> {
    let Some(first) = vectors.first() else { return vec![] };
    (0..first.dim())
        .map(|s| {
            let (lo, hi) = vectors
                .iter()
                .map(|v| v.angles[s])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
            hi - lo
        })
        .collect()
}

/// Grid search over per-setting global phases `φ_k ∈ {2πj/steps}` (with
/// `φ_0 = 0`) minimising the swing.  Ties resolve to the lexicographically
/// first grid point, so the result is deterministic.
pub fn optimize_global_phases(dev: &GmziDevice, steps: usize) -> (Vec<f64>, f64) {
    let n = dev.settings_count();
    let grid: Vec<f64> = (0..steps).map(|j| 2.0 * PI * j as f64 / steps as f64).collect();
    // the swing separates per shifter but couples settings only through
    // max/min, so brute force over the product grid
    let mut idx = vec![0usize; n.saturating_sub(1)];
    let mut best: Option<(Vec<f64>, f64)> = None;
    loop {
        let mut phases = vec![0.0];
        phases.extend(idx.iter().map(|&j| grid[j]));
        let candidate = dev.clone().with_global_phases(phases.clone()).expect("length matches");
        let sw = phase_swing(&candidate, None);
        if best.as_ref().map_or(true, |(_, b)| sw < b - 1e-9) {
            best = Some((phases, sw));
        }
        // odometer increment, last digit fastest
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return best.expect("at least one grid point");
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < steps {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// One worked example of swing reduction by fixed offsets.
#[derive(Clone, Debug, Serialize)]
pub struct SwingReduction {
    pub label: &'static str,
    pub spec: GroupSpec,
    pub offsets: Vec<f64>,
    pub global_phases: Vec<f64>,
    pub swing_before: f64,
    pub swing_after: f64,
    /// Active phase vectors of the offset device, one per setting.
    pub settings: Vec<Vec<f64>>,
}

/// The three reference offset constructions: Hadamard N=2, DFT N=3 and
/// Hadamard N=4.
pub fn reduced_swing_examples() -> Vec<SwingReduction> {
    let cases: [(&'static str, GroupSpec, Vec<f64>, Option<Vec<f64>>); 3] = [
        ("hadamard-2", GroupSpec::hadamard(1), vec![-1.5 * PI, 0.0], None),
        ("dft-3", GroupSpec::cyclic(3), vec![-4.0 * PI / 3.0, 0.0, 0.0], None),
        // at N=4 the swing stays π; this choice of global phases leaves a
        // single shifter at −π in every setting
        ("hadamard-4", GroupSpec::hadamard(2), vec![-PI, 0.0, 0.0, 0.0], Some(vec![0.0, PI, PI, PI])),
    ];
    cases
        .into_iter()
        .map(|(label, spec, offsets, phases)| {
            let base = build_gmzi(&spec);
            let swing_before = phase_swing(&base, None);
            let with_off = base.with_offsets(PhaseVector::new(offsets.clone())).expect("dims match");
            let global_phases = match phases {
                Some(p) => p,
                None => optimize_global_phases(&with_off, 12).0,
            };
            let dev = with_off.with_global_phases(global_phases.clone()).expect("dims match");
            let swing_after = phase_swing(&dev, None);
            let settings = (0..dev.settings_count()).map(|k| dev.active_phases(k).angles).collect();
            SwingReduction { label, spec, offsets, global_phases, swing_before, swing_after, settings }
        })
        .collect()
}
