use std::collections::HashSet;

use muxkit::analytics::{ghz_improvement_example, ghz_improvement_with};
use muxkit::patterns::*;
use proptest::prelude::*;

#[test]
fn bsg_single_layer_covers_66_of_70() {
    let (layer, report) = search_single_mzi_layer(8, 4, &bsg_usable_patterns()).unwrap();
    assert_eq!(report.total_patterns, 70);
    assert_eq!(report.routable_patterns, 66);
    assert_eq!(layer.pairs, vec![(0, 1), (2, 3), (4, 6), (5, 7)]);
    // every failure fills two MZIs completely
    assert_eq!(report.unroutable.len(), 4);
    for p in &report.unroutable {
        let full = layer.pairs.iter().filter(|&&(a, b)| p.contains(a) && p.contains(b)).count();
        assert_eq!(full, 2, "{p}");
    }
}

#[test]
fn bsg_witnesses_land_in_usable_set() {
    let usable: HashSet<u64> = bsg_usable_patterns().iter().map(|p| p.bits()).collect();
    let (layer, report) = search_single_mzi_layer(8, 4, &bsg_usable_patterns()).unwrap();
    for (p, mask) in &report.witnesses {
        assert!(usable.contains(&layer.apply(*mask, p.bits())));
    }
}

#[test]
fn bsg_excess_photons_always_leave_a_usable_subpattern() {
    let (layer, _) = search_single_mzi_layer(8, 4, &bsg_usable_patterns()).unwrap();
    assert!(excess_photon_coverage(&layer, 4, &bsg_usable_patterns()).unwrap());
    let usable: HashSet<u64> = bsg_usable_patterns().iter().map(|p| p.bits()).collect();
    let empty = PhotonPattern::new(8, 0).unwrap();
    assert!(routable_subpattern(&layer, &usable, empty, 4).is_none());
}

#[test]
fn layer_without_switching_only_covers_usable_patterns() {
    // identity pairing (i, i+4): each MZI can only choose i or i+4, so the
    // 16 usable patterns are exactly the routable ones
    let layer = MziLayerConfig::new(8, vec![(0, 4), (1, 5), (2, 6), (3, 7)]).unwrap();
    let r = layer_coverage(&layer, 4, &bsg_usable_patterns()).unwrap();
    assert_eq!(r.routable_patterns, 16);
}

#[test]
fn ghz_single_layer_covers_666_of_924() {
    let (layer, report) = ghz_best_layer();
    assert_eq!(ghz_usable_patterns().len(), 64);
    assert_eq!((report.routable_patterns, report.total_patterns), (666, 924));
    assert_eq!(layer.modes, 12);
}

#[test]
fn ghz_coverage_table_is_monotone() {
    let t = ghz_coverage_by_photon_count();
    assert_eq!(t.len(), 13);
    assert!(t[..6].iter().all(|&f| f == 0.0));
    assert!((t[6] - 666.0 / 924.0).abs() < 1e-15);
    assert!(t[6..].windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(t[12], 1.0);
}

#[test]
fn ghz_improvement_factors() {
    let g = ghz_improvement_example();
    assert!((g.factor_mzi - 7.0).abs() <= 0.2, "{}", g.factor_mzi);
    assert!((g.factor_optimal - 22.0).abs() <= 1.0, "{}", g.factor_optimal);
    assert!((g.factor_doubled - 21.0).abs() <= 1.0, "{}", g.factor_doubled);
    // perfect routing of any ≥6 photons folds to P[Bin(12, q) ≥ 6]
    let perfect = ghz_improvement_with(|k| if k >= 6 { 1.0 } else { 0.0 });
    let q = 1.0 - 0.95f64.powi(4);
    let direct: f64 = (6..=12).map(|k| muxkit::analytics::binomial_pmf(12, q, k)).sum();
    assert!((perfect.p_mzi - direct).abs() < 1e-15);
}

/// Relabelling modes by a symmetry of the usable set maps routable
/// patterns of one matching onto those of the relabelled matching.
#[test]
fn coverage_invariant_under_usable_symmetries() {
    let usable = bsg_usable_patterns();
    let syms: Vec<Vec<usize>> = vec![
        vec![4, 1, 2, 3, 0, 5, 6, 7], // swap 0 ↔ 4
        vec![1, 2, 3, 0, 5, 6, 7, 4], // rotate the pair index
        vec![4, 5, 6, 7, 0, 1, 2, 3], // exchange halves
    ];
    for pairs in perfect_matchings(8) {
        let base = layer_coverage(&MziLayerConfig::new(8, pairs.clone()).unwrap(), 4, &usable).unwrap().routable_patterns;
        for s in &syms {
            let moved = pairs.iter().map(|&(a, b)| (s[a], s[b])).collect();
            let r = layer_coverage(&MziLayerConfig::new(8, moved).unwrap(), 4, &usable).unwrap().routable_patterns;
            assert_eq!(base, r);
        }
    }
}

#[test]
fn four_photon_routing_complete_against_brute_force() {
    // the algorithm never fails, and brute force finds nothing it missed;
    // check a spread of the 1820 patterns against the full setting space
    let all = PhotonPattern::all_with(16, 4);
    for p in all.iter().step_by(7) {
        assert!(route_two_layer_four(16, p).is_ok());
        assert!(brute_force_two_layer_four(16, p).unwrap());
    }
}

#[test]
fn six_photon_routing_three_in_one_gmzi() {
    let p = PhotonPattern::from_modes(18, &[0, 1, 2, 3, 9, 17]).unwrap();
    let r = route_gmzi3_layer_six(18, &p).unwrap();
    let mut l = r.labels.clone();
    l.sort_unstable();
    assert_eq!(l, vec![1, 2, 3, 4, 5, 6]);
    assert_eq!(replay_gmzi3_layer_six(&p, &r.shifts, &r.layer2), Some(r.labels));
}

#[test]
fn six_photon_presorted_identity() {
    // one photon at output j of GMZIs 0 and 1, per class: all-bar works
    let p = PhotonPattern::from_modes(18, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(replay_gmzi3_layer_six(&p, &[0; 6], &[false; 9]), Some(vec![1, 2, 3, 4, 5, 6]));
}

#[test]
fn rail_rearrangement_fractions() {
    assert_eq!(bell_rail_rearrange_fraction(RailBlocks::Asymptotic).unwrap(), Fraction::new(45, 64));
    assert_eq!(bell_rail_rearrange_fraction(RailBlocks::Finite(1)).unwrap(), Fraction::new(66, 70));
    assert!((binning_probability().value() - 0.09375).abs() < 1e-15);
}

proptest! {
    #[test]
    fn four_photon_route_replays(idx in 0usize..1820) {
        let p = PhotonPattern::all_with(16, 4)[idx];
        let r = route_two_layer_four(16, &p).unwrap();
        prop_assert_eq!(replay_two_layer_four(16, &p, &r.layer1, &r.layer2), Some(r.labels.clone()));
        let mut l = r.labels;
        l.sort_unstable();
        prop_assert_eq!(l, vec![1, 2, 3, 4]);
    }

    #[test]
    fn four_photon_route_any_size(blocks in 1usize..=6, seed in any::<u64>()) {
        let modes = 4 * blocks;
        let all = PhotonPattern::all_with(modes, 4);
        let p = all[(seed % all.len() as u64) as usize];
        let r = route_two_layer_four(modes, &p).unwrap();
        prop_assert_eq!(r.labels.len(), 4);
    }

    #[test]
    fn six_photon_route_any_size(blocks in 1usize..=4, seed in any::<u64>()) {
        let modes = 6 * blocks;
        let all = PhotonPattern::all_with(modes, 6);
        let p = all[(seed % all.len() as u64) as usize];
        let r = route_gmzi3_layer_six(modes, &p).unwrap();
        let mut l = r.labels;
        l.sort_unstable();
        prop_assert_eq!(l, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn pruned_pattern_is_a_subset(bits in 0u64..(1 << 16), seed in any::<u64>()) {
        let p = PhotonPattern::new(16, bits).unwrap();
        prop_assume!(p.photons() >= 4);
        let q = prune_extras(p, 4, seed, |_| true).unwrap();
        prop_assert_eq!(q.photons(), 4);
        prop_assert_eq!(q.bits() & !p.bits(), 0);
        prop_assert!(route_two_layer_four(16, &q).is_ok());
    }
}
