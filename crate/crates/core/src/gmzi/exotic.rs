//! Constructions beyond plain permutation settings: pairwise couplers,
//! half-range MZIs and the enlarged (two-factor) GMZI factorisation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::device::{canonical_angle, GmziDevice};
use crate::error::{invalid, Error, Result};
use crate::linalg::{cis, cyclic_perm, dft_matrix, kron, Complex, PermutationMatrix, PhaseVector, TransferMatrix};

/// Phase vector and transfer matrix of a Hadamard-type GMZI driven as a
/// switchable pairwise coupler from input `p1` onto outputs `q1`, `q2`.
///
/// `φ = 0` reproduces the route to `q1`, `φ = π` the route to `q2`, and
/// values in between split the photon.
pub fn switchable_pairwise_coupler(
    dev: &GmziDevice,
    p1: usize,
    q1: usize,
    q2: usize,
    phi: f64,
) -> Result<(PhaseVector, TransferMatrix)> {
    if !dev.spec().is_hadamard_type() {
        return invalid(format!("pairwise coupler needs a Hadamard-type device, got {}", dev.spec()));
    }
    let n = dev.n();
    if p1 >= n || q1 >= n || q2 >= n {
        return invalid(format!("ports must lie in 0..{n}"));
    }
    if q1 == q2 {
        return invalid("the two output ports must differ");
    }
    let k1 = dev.setting_for(p1, q1);
    let k2 = dev.setting_for(p1, q2);
    if dev.route(k1, p1) != q1 || dev.route(k2, p1) != q2 {
        return Err(Error::Internal("no setting pair routes the requested ports".into()));
    }
    let (d1, d2) = (dev.ideal_phases(k1), dev.ideal_phases(k2));
    // e^{-iφ/2}[cos(φ/2) d1 + i sin(φ/2) d2] with d1, d2 ∈ {±1}: equal entries
    // keep d1's phase, opposite entries pick up −φ.
    let angles = d1
        .angles
        .iter()
        .zip(&d2.angles)
        .map(|(&a, &b)| {
            let same = (cis(a) - cis(b)).norm() < 1e-9;
            if same {
                a
            } else {
                a - phi
            }
        })
        .collect();
    let d = PhaseVector::new(angles);
    let u = dev.passive().matmul(&d.to_diag()).matmul(&dev.passive().adjoint());
    Ok((d, u))
}

/// Which two-mode operation a half-range MZI switches in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfRangeVariant {
    /// `I` or `h_c†`.
    Hc,
    /// `Z` or `h`.
    H,
}

/// Fixed offset of the push-pull form.
pub const HALF_RANGE_OFFSET: [f64; 2] = [-7.0 * PI / 4.0, 0.0];

fn h() -> TransferMatrix {
    dft_matrix(2).expect("n = 2")
}

/// `h_c = [[1, −i], [−i, 1]]/√2`.
pub fn hc() -> TransferMatrix {
    let r = 1.0 / 2f64.sqrt();
    TransferMatrix::from_fn(2, |i, j| if i == j { Complex::new(r, 0.0) } else { Complex::new(0.0, -r) })
}

/// `S = diag(1, i)`.
pub fn s_gate() -> TransferMatrix {
    TransferMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => Complex::new(1.0, 0.0),
        (1, 1) => Complex::new(0.0, 1.0),
        _ => Complex::new(0.0, 0.0),
    })
}

/// Direct form `h (I or diag(1, −i)) h`, giving `I` or `e^{−iπ/4} h_c†`;
/// the h-variant dresses it with `S†` on both sides, giving `Z` or
/// `e^{−iπ/4} h`.
pub fn half_range_mzi(select: bool, variant: HalfRangeVariant) -> TransferMatrix {
    let d = if select { TransferMatrix::diag_phases(&[0.0, -PI / 2.0]) } else { TransferMatrix::identity(2) };
    let core = h().matmul(&d).matmul(&h());
    dress(core, variant)
}

fn dress(core: TransferMatrix, variant: HalfRangeVariant) -> TransferMatrix {
    match variant {
        HalfRangeVariant::Hc => core,
        HalfRangeVariant::H => {
            let sd = s_gate().adjoint();
            sd.matmul(&core).matmul(&sd)
        }
    }
}

/// Active phases of the push-pull form (before the fixed offset).
pub fn half_range_active_phases(select: bool) -> PhaseVector {
    if select {
        PhaseVector::new(vec![0.0, -PI / 4.0])
    } else {
        PhaseVector::new(vec![-PI / 4.0, 0.0])
    }
}

/// Push-pull realisation: exactly `I`/`h_c†` (or `Z`/`h`), with no
/// setting-dependent global phase.
pub fn half_range_push_pull(select: bool, variant: HalfRangeVariant) -> TransferMatrix {
    let a = half_range_active_phases(select);
    let total: Vec<f64> = a.angles.iter().zip(HALF_RANGE_OFFSET).map(|(x, o)| x + o).collect();
    let core = h().matmul(&TransferMatrix::diag_phases(&total)).matmul(&h());
    dress(core, variant)
}

/// Active phase range of the push-pull form over its two settings.
pub fn half_range_active_swing() -> f64 {
    let v = [half_range_active_phases(false), half_range_active_phases(true)];
    (0..2)
        .map(|s| {
            let (a, b) = (canonical_angle(v[0].angles[s]), canonical_angle(v[1].angles[s]));
            (a - b).abs()
        })
        .fold(0.0, f64::max)
}

/// `(P_{(k1,k2)}, (C^{(n1)} ⊗ I)^{k1}, (I ⊗ C^{(n2)})^{k2})`; the first is
/// exactly the product of the other two, which is what lets an `n1·n2` GMZI
/// act as `n1` separate `n2`-to-1 devices.
pub fn enlarged_gmzi_factorization(
    n1: usize,
    n2: usize,
    k1: usize,
    k2: usize,
) -> Result<(TransferMatrix, TransferMatrix, TransferMatrix)> {
    if n1 < 1 || n2 < 1 || k1 >= n1 || k2 >= n2 {
        return invalid(format!("powers must satisfy k1 < n1 and k2 < n2 (got {k1}/{n1}, {k2}/{n2})"));
    }
    let c1 = cyclic_perm(n1, k1 as i64).to_matrix();
    let c2 = cyclic_perm(n2, k2 as i64).to_matrix();
    let p = kron(&c1, &c2);
    let a = kron(&c1, &TransferMatrix::identity(n2));
    let b = kron(&TransferMatrix::identity(n1), &c2);
    Ok((p, a, b))
}

/// Joint settings of independent GMZIs acting on disjoint blocks.
pub fn parallel_gmzi_settings_count(partition: &[usize]) -> Result<u128> {
    if partition.iter().any(|&b| b == 0) {
        return invalid("block sizes must be >= 1");
    }
    Ok(partition.iter().map(|&b| b as u128).product())
}

/// The block partition of `n` modes into parallel GMZIs with the most joint
/// settings (blocks of three, with a remainder of two or four).
pub fn best_parallel_partition(n: usize) -> Vec<usize> {
    match n {
        0 => vec![],
        1 => vec![1],
        _ => {
            let mut rest = n;
            let mut out = Vec::new();
            while rest > 4 {
                out.push(3);
                rest -= 3;
            }
            if rest == 4 {
                out.extend([2, 2]);
            } else {
                out.push(rest);
            }
            out
        }
    }
}

/// Permutation view of the enlarged factorisation, for index-level checks.
pub fn enlarged_permutation(n1: usize, n2: usize, k1: usize, k2: usize) -> PermutationMatrix {
    cyclic_perm(n1, k1 as i64).kron(&cyclic_perm(n2, k2 as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmzi::{build_gmzi, GroupSpec};
    use crate::linalg::{equal_up_to_global_phase, DEFAULT_TOL};

    #[test]
    fn coupler_endpoints() {
        let dev = build_gmzi(&GroupSpec::hadamard(2));
        let (_, u0) = switchable_pairwise_coupler(&dev, 1, 1, 2, 0.0).unwrap();
        let k1 = dev.setting_for(1, 1);
        let k2 = dev.setting_for(1, 2);
        assert!(equal_up_to_global_phase(&u0, &dev.setting_matrix_index(k1).unwrap(), DEFAULT_TOL));
        let (_, upi) = switchable_pairwise_coupler(&dev, 1, 1, 2, PI).unwrap();
        assert!(equal_up_to_global_phase(&upi, &dev.setting_matrix_index(k2).unwrap(), DEFAULT_TOL));
    }

    #[test]
    fn coupler_balanced_split() {
        let dev = build_gmzi(&GroupSpec::hadamard(1));
        let (_, u) = switchable_pairwise_coupler(&dev, 0, 0, 1, PI / 2.0).unwrap();
        assert!((u.get(0, 0).norm_sqr() - 0.5).abs() < 1e-12);
        assert!((u.get(1, 0).norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coupler_matches_linear_combination() {
        let dev = build_gmzi(&GroupSpec::hadamard(3));
        let phi = 0.7;
        let (d, u) = switchable_pairwise_coupler(&dev, 3, 5, 0, phi).unwrap();
        let uk1 = dev.setting_matrix_index(dev.setting_for(3, 5)).unwrap();
        let uk2 = dev.setting_matrix_index(dev.setting_for(3, 0)).unwrap();
        let want = uk1
            .scale(Complex::new((phi / 2.0).cos(), 0.0))
            .add(&uk2.scale(Complex::new(0.0, (phi / 2.0).sin())))
            .scale(cis(-phi / 2.0));
        assert!(u.max_abs_diff(&want) < 1e-12);
        for a in d.angles {
            let ok = [0.0, -phi, -PI, -PI - phi].iter().any(|&c| (a - c).abs() < 1e-12);
            assert!(ok, "phase {a} outside the allowed set");
        }
    }

    #[test]
    fn coupler_rejects_non_hadamard() {
        let dev = build_gmzi(&GroupSpec::cyclic(3));
        assert!(switchable_pairwise_coupler(&dev, 0, 1, 2, 0.3).is_err());
    }

    #[test]
    fn half_range_forms() {
        let hc_dag = hc().adjoint();
        assert!(half_range_mzi(false, HalfRangeVariant::Hc).max_abs_diff(&TransferMatrix::identity(2)) < 1e-12);
        let want = hc_dag.scale(cis(-PI / 4.0));
        assert!(half_range_mzi(true, HalfRangeVariant::Hc).max_abs_diff(&want) < 1e-12);
        assert!(half_range_push_pull(true, HalfRangeVariant::Hc).max_abs_diff(&hc_dag) < 1e-12);
        assert!(half_range_push_pull(false, HalfRangeVariant::Hc).max_abs_diff(&TransferMatrix::identity(2)) < 1e-12);
        let z = TransferMatrix::diag_phases(&[0.0, PI]);
        assert!(half_range_push_pull(false, HalfRangeVariant::H).max_abs_diff(&z) < 1e-12);
        assert!(half_range_push_pull(true, HalfRangeVariant::H).max_abs_diff(&h()) < 1e-12);
        assert!(equal_up_to_global_phase(&half_range_mzi(true, HalfRangeVariant::H), &h(), DEFAULT_TOL));
        assert!((half_range_active_swing() - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn enlarged_factorisation() {
        let (p, a, b) = enlarged_gmzi_factorization(2, 2, 1, 0).unwrap();
        assert_eq!(p, kron(&cyclic_perm(2, 1).to_matrix(), &TransferMatrix::identity(2)));
        assert_eq!(p, a.matmul(&b));
        let (p, _, _) = enlarged_gmzi_factorization(2, 2, 0, 0).unwrap();
        assert_eq!(p, TransferMatrix::identity(4));
        let (p, a, b) = enlarged_gmzi_factorization(4, 2, 2, 1).unwrap();
        assert_eq!(p, kron(&cyclic_perm(4, 2).to_matrix(), &cyclic_perm(2, 1).to_matrix()));
        assert_eq!(p, a.matmul(&b));
        assert!(enlarged_gmzi_factorization(2, 2, 2, 0).is_err());
    }

    #[test]
    fn parallel_counts() {
        assert_eq!(parallel_gmzi_settings_count(&[2, 2, 2]).unwrap(), 8);
        assert_eq!(parallel_gmzi_settings_count(&[6]).unwrap(), 6);
        assert_eq!(parallel_gmzi_settings_count(&[3, 3, 3]).unwrap(), 27);
        assert_eq!(best_parallel_partition(9), vec![3, 3, 3]);
        assert_eq!(best_parallel_partition(10), vec![3, 3, 2, 2]);
    }
}
