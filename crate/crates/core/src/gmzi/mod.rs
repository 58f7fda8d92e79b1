//! Generalised Mach–Zehnder interferometers.
//!
//! A GMZI is a passive unitary `W`, one layer of fast phase shifters `D_k`,
//! and `W†`.  With `W` a Kronecker product of DFT blocks the `N` settings
//! realise an abelian group of mode permutations `P_k = ⊗ C^{k_l}`.

mod device;
mod exotic;
mod group;
mod search;
mod stages;
mod swing;

pub use device::{build_gmzi, canonical_angle, round_sig, GmziDevice};
pub use exotic::{
    best_parallel_partition, enlarged_gmzi_factorization, enlarged_permutation, half_range_active_phases,
    half_range_active_swing, half_range_mzi, half_range_push_pull, hc, parallel_gmzi_settings_count, s_gate,
    switchable_pairwise_coupler, HalfRangeVariant, HALF_RANGE_OFFSET,
};
pub use group::{classify_gmzi_types, factorize, GroupSpec};
pub use search::{
    check_mux_lemma, count_orthogonal_phase_sets, max_orthogonal_set, pairwise_orthogonal,
    search_orthogonal_phase_sets, ternary_six_vectors, MuxLemmaReport, SEARCH_LIMIT, TERNARY_SIX_INDICES,
};
pub use stages::{decompose_stages, Stage, StageDecomposition};
pub use swing::{optimize_global_phases, per_shifter_swing, phase_swing, reduced_swing_examples, SwingReduction};
