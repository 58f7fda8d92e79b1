use serde::Serialize;

use super::group::GroupSpec;
use crate::linalg::{dft_matrix, kron, PermutationMatrix, TransferMatrix};

/// One layer of local interference: `blocks` copies of `W^{(block)}` acting
/// on contiguous groups of modes, followed by a crossing network.
#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub block: usize,
    pub blocks: usize,
    /// Permutation applied after this stage.  For the last stage it is the
    /// output relabelling and carries no physical crossings.
    pub crossing_after: PermutationMatrix,
}

/// `W` written as interference stages separated by crossing networks,
/// listed in the order light traverses them.
#[derive(Clone, Debug, Serialize)]
pub struct StageDecomposition {
    pub n: usize,
    pub input_relabel: PermutationMatrix,
    pub stages: Vec<Stage>,
}

impl StageDecomposition {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Pairwise crossings in the physical networks between stages.
    /// The leading and trailing permutations are relabellings and count zero.
    pub fn crossings(&self) -> u64 {
        let k = self.stages.len();
        self.stages.iter().take(k.saturating_sub(1)).map(|s| s.crossing_after.inversions()).sum()
    }

    /// Largest distance any mode moves inside a physical crossing network.
    pub fn largest_crossing_span(&self) -> usize {
        let k = self.stages.len();
        self.stages
            .iter()
            .take(k.saturating_sub(1))
            .map(|s| s.crossing_after.max_displacement())
            .max()
            .unwrap_or(0)
    }

    /// Multiply the stages back together (rightmost acts first).
    pub fn product(&self) -> TransferMatrix {
        let mut acc = self.input_relabel.to_matrix();
        for st in &self.stages {
            let local = kron(&TransferMatrix::identity(st.blocks), &dft_matrix(st.block).expect("block >= 2"));
            acc = st.crossing_after.to_matrix().matmul(&local.matmul(&acc));
        }
        acc
    }
}

/// Permutation that moves digit `l` of the mixed-radix index to the fastest
/// position, keeping the other digits in order.
fn digit_to_back(spec: &GroupSpec, l: usize) -> (PermutationMatrix, GroupSpec) {
    let f = spec.factors();
    let mut order: Vec<usize> = (0..f.len()).filter(|&i| i != l).collect();
    order.push(l);
    let target = GroupSpec::new(order.iter().map(|&i| f[i]).collect()).expect("valid factors");
    let mapping = (0..spec.order())
        .map(|t| {
            let d = spec.digits(t);
            let nd: Vec<usize> = order.iter().map(|&i| d[i]).collect();
            target.index(&nd).expect("in range")
        })
        .collect();
    (PermutationMatrix::new(mapping).expect("bijection"), target)
}

/// Factor `W = ⊗_l W^{(n_l)}` into `r` stages of contiguous local blocks.
///
/// The last factor is already fastest and goes first; every later factor is
/// brought to the back by a crossing network.
pub fn decompose_stages(spec: &GroupSpec) -> StageDecomposition {
    let n = spec.order();
    let r = spec.rank();
    // Q_l^{-1}: original layout -> layout with digit l fastest
    let to_back: Vec<PermutationMatrix> = (0..r).map(|l| digit_to_back(spec, l).0).collect();
    let order: Vec<usize> = (0..r).rev().collect();
    let mut stages = Vec::with_capacity(r);
    let input_relabel = match order.first() {
        Some(&l) => to_back[l].clone(),
        None => PermutationMatrix::identity(n),
    };
    for (i, &l) in order.iter().enumerate() {
        let back_home = to_back[l].inverse();
        let crossing_after = match order.get(i + 1) {
            Some(&next) => to_back[next].compose(&back_home),
            None => back_home,
        };
        stages.push(Stage { block: spec.factors()[l], blocks: n / spec.factors()[l], crossing_after });
    }
    StageDecomposition { n, input_relabel, stages }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmzi::device::build_gmzi;

    #[test]
    fn single_factor_has_no_crossings() {
        let d = decompose_stages(&GroupSpec::cyclic(2));
        assert_eq!(d.stage_count(), 1);
        assert_eq!(d.crossings(), 0);
        assert!(d.product().max_abs_diff(&dft_matrix(2).unwrap()) < 1e-12);
    }

    #[test]
    fn four_qubit_hadamard_product() {
        let s = GroupSpec::hadamard(4);
        let d = decompose_stages(&s);
        assert_eq!(d.stage_count(), 4);
        assert!(d.stages.iter().all(|st| st.block == 2 && st.blocks == 8));
        assert!(d.product().max_abs_diff(build_gmzi(&s).passive()) < 1e-9);
        assert!(d.crossings() > 0);
    }

    #[test]
    fn mixed_spec_two_stages() {
        let s = GroupSpec::new(vec![4, 2]).unwrap();
        let d = decompose_stages(&s);
        let blocks: Vec<usize> = d.stages.iter().map(|st| st.block).collect();
        assert_eq!(blocks, vec![2, 4]);
        assert!(d.product().max_abs_diff(build_gmzi(&s).passive()) < 1e-9);
    }
}
