use std::f64::consts::PI;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::group::GroupSpec;
use crate::error::{Error, Result};
use crate::linalg::{cis, cyclic_perm, dft_matrix, kron_all, PermutationMatrix, PhaseVector, TransferMatrix};

const TWO_PI: f64 = 2.0 * PI;

/// Reduce an angle to the branch (−2π, 0].  Values within 1e−12 of a
/// multiple of 2π snap to 0 so that rounding never flips a phase to −2π.
pub fn canonical_angle(theta: f64) -> f64 {
    let m = (theta / TWO_PI).round();
    if (theta - m * TWO_PI).abs() < 1e-12 {
        return 0.0;
    }
    theta - TWO_PI * (theta / TWO_PI).ceil()
}

/// Round to `digits` significant digits (used for serialisation).
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// A generalised Mach–Zehnder interferometer: `W · D_k · W†` with `W` the
/// Kronecker product of DFT blocks.
///
/// Each setting `k` carries an optional global phase `φ_k` and the device may
/// carry fixed offset phases `o`.  The active shifter values are then
/// `a_k = θ_k + φ_k − o` (reduced to (−2π, 0]) and the physical transfer
/// matrix is `e^{iφ_k} P_k`.
#[derive(Clone, Debug)]
pub struct GmziDevice {
    spec: GroupSpec,
    n: usize,
    passive: TransferMatrix,
    passive_adj: TransferMatrix,
    ideal: Vec<PhaseVector>,
    global_phases: Vec<f64>,
    offsets: Option<PhaseVector>,
}

/// Build the standard device for a group spec.
pub fn build_gmzi(spec: &GroupSpec) -> GmziDevice {
    let blocks: Vec<TransferMatrix> = spec.factors().iter().map(|&n| dft_matrix(n).expect("factor >= 2")).collect();
    let passive = kron_all(&blocks);
    let n = spec.order();
    let ideal = (0..n)
        .map(|k| {
            let kd = spec.digits(k);
            let angles = (0..n)
                .map(|s| {
                    let sd = spec.digits(s);
                    // −2π Σ (k_l s_l mod n_l)/n_l, accumulated exactly per factor
                    let frac: f64 = kd
                        .iter()
                        .zip(&sd)
                        .zip(spec.factors())
                        .map(|((&kl, &sl), &nl)| ((kl * sl) % nl) as f64 / nl as f64)
                        .sum();
                    canonical_angle(-TWO_PI * frac)
                })
                .collect();
            PhaseVector::new(angles)
        })
        .collect();
    GmziDevice {
        spec: spec.clone(),
        n,
        passive_adj: passive.adjoint(),
        passive,
        ideal,
        global_phases: vec![0.0; n],
        offsets: None,
    }
}

impl GmziDevice {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn settings_count(&self) -> usize {
        self.n
    }

    pub fn passive(&self) -> &TransferMatrix {
        &self.passive
    }

    pub fn offsets(&self) -> Option<&PhaseVector> {
        self.offsets.as_ref()
    }

    pub fn global_phases(&self) -> &[f64] {
        &self.global_phases
    }

    pub fn with_offsets(mut self, offsets: PhaseVector) -> Result<Self> {
        if offsets.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "offset vector has {} entries, device has {} shifters",
                offsets.dim(),
                self.n
            )));
        }
        self.offsets = Some(offsets);
        Ok(self)
    }

    pub fn with_global_phases(mut self, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} global phases given for {} settings",
                phases.len(),
                self.n
            )));
        }
        self.global_phases = phases;
        Ok(self)
    }

    pub fn setting_index(&self, k: &[usize]) -> Result<usize> {
        self.spec.index(k)
    }

    pub fn setting_vector(&self, index: usize) -> Vec<usize> {
        self.spec.digits(index)
    }

    /// The textbook phase vector `d_k` (no offsets, no global phase).
    pub fn ideal_phases(&self, index: usize) -> &PhaseVector {
        &self.ideal[index]
    }

    /// Phases the active shifters must be driven to for setting `index`.
    pub fn active_phases(&self, index: usize) -> PhaseVector {
        let phi = self.global_phases[index];
        let angles = self.ideal[index]
            .angles
            .iter()
            .enumerate()
            .map(|(s, &theta)| {
                let off = self.offsets.as_ref().map_or(0.0, |o| o.angles[s]);
                canonical_angle(theta + phi - off)
            })
            .collect();
        PhaseVector::new(angles)
    }

    /// Total phase (active + offset) seen by each mode.
    pub fn physical_phases(&self, index: usize) -> PhaseVector {
        let mut pv = self.active_phases(index);
        if let Some(o) = &self.offsets {
            for (a, b) in pv.angles.iter_mut().zip(&o.angles) {
                *a += b;
            }
        }
        pv
    }

    /// Transfer matrix `W · D · W†` of setting `index`, offsets included.
    pub fn setting_matrix_index(&self, index: usize) -> Result<TransferMatrix> {
        if index >= self.n {
            return Err(Error::InvalidArgument(format!("setting {index} out of range 0..{}", self.n)));
        }
        let d = self.physical_phases(index).to_diag();
        Ok(self.passive.matmul(&d).matmul(&self.passive_adj))
    }

    pub fn setting_matrix(&self, k: &[usize]) -> Result<TransferMatrix> {
        self.setting_matrix_index(self.setting_index(k)?)
    }

    /// `P_k = ⊗ (C^{(n_l)})^{k_l}` — what setting `index` must realise.
    pub fn expected_permutation(&self, index: usize) -> PermutationMatrix {
        let digits = self.spec.digits(index);
        digits
            .iter()
            .zip(self.spec.factors())
            .fold(PermutationMatrix::identity(1), |acc, (&k, &n)| acc.kron(&cyclic_perm(n, k as i64)))
    }

    /// Output port reached from input `t` under setting `index`.
    pub fn route(&self, index: usize, input: usize) -> usize {
        self.spec.add(index, input)
    }

    /// The unique setting that routes `input` to `output`.
    pub fn setting_for(&self, input: usize, output: usize) -> usize {
        self.spec.difference(output, input)
    }

    /// Expected global phase factor `e^{iφ_k}` of setting `index`.
    pub fn global_factor(&self, index: usize) -> num_complex::Complex64 {
        cis(self.global_phases[index])
    }
}

impl Serialize for GmziDevice {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let round = |pv: &PhaseVector| pv.angles.iter().map(|&a| round_sig(a, 15)).collect::<Vec<f64>>();
        let mut st = ser.serialize_struct("GmziDevice", 4)?;
        st.serialize_field("spec", self.spec.factors())?;
        st.serialize_field("N", &self.n)?;
        st.serialize_field("offsets", &self.offsets.as_ref().map(round))?;
        let settings: Vec<Vec<f64>> = (0..self.n).map(|k| round(&self.active_phases(k))).collect();
        st.serialize_field("settings", &settings)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{equal_up_to_global_phase, DEFAULT_TOL};

    fn spec(f: &[usize]) -> GroupSpec {
        GroupSpec::new(f.to_vec()).unwrap()
    }

    #[test]
    fn two_mode_device_is_identity_then_swap() {
        let dev = build_gmzi(&spec(&[2]));
        let m0 = dev.setting_matrix(&[0]).unwrap();
        assert!(equal_up_to_global_phase(&m0, &TransferMatrix::identity(2), DEFAULT_TOL));
        let m1 = dev.setting_matrix(&[1]).unwrap();
        assert!(equal_up_to_global_phase(&m1, &cyclic_perm(2, 1).to_matrix(), DEFAULT_TOL));
    }

    #[test]
    fn four_mode_cyclic_shift() {
        let dev = build_gmzi(&spec(&[4]));
        let m = dev.setting_matrix(&[1]).unwrap();
        assert!(m.max_abs_diff(&cyclic_perm(4, 1).to_matrix()) < 1e-12);
        let dev8 = build_gmzi(&spec(&[8]));
        let m = dev8.setting_matrix(&[3]).unwrap();
        assert!(equal_up_to_global_phase(&m, &cyclic_perm(8, 3).to_matrix(), DEFAULT_TOL));
    }

    #[test]
    fn mixed_factor_setting() {
        let dev = build_gmzi(&spec(&[4, 2]));
        let m = dev.setting_matrix(&[1, 1]).unwrap();
        let want = cyclic_perm(4, 1).kron(&cyclic_perm(2, 1)).to_matrix();
        assert!(equal_up_to_global_phase(&m, &want, DEFAULT_TOL));
        assert!(dev.setting_matrix(&[4, 0]).is_err());
    }

    #[test]
    fn two_by_two_realises_the_klein_group() {
        let dev = build_gmzi(&spec(&[2, 2]));
        let mut seen = Vec::new();
        for k in 0..4 {
            let (p, _) = dev.setting_matrix_index(k).unwrap().as_monomial(1e-9).unwrap();
            seen.push(p.mapping().to_vec());
        }
        seen.sort();
        assert_eq!(seen, vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]]);
    }

    #[test]
    fn canonical_branch() {
        assert_eq!(canonical_angle(0.0), 0.0);
        assert_eq!(canonical_angle(2.0 * PI), 0.0);
        assert!((canonical_angle(PI / 2.0) + 1.5 * PI).abs() < 1e-12);
        assert!((canonical_angle(-2.5 * PI) + 0.5 * PI).abs() < 1e-12);
        assert_eq!(canonical_angle(-2.0 * PI), 0.0);
    }

    #[test]
    fn serialisation_record() {
        let dev = build_gmzi(&spec(&[2]));
        let v = serde_json::to_value(&dev).unwrap();
        assert_eq!(v["N"], 2);
        assert_eq!(v["spec"], serde_json::json!([2]));
        assert_eq!(v["settings"][1][1].as_f64().unwrap(), round_sig(-PI, 15));
    }
}
