use muxkit::analytics::{raster_rate, RasterStrategy};
use muxkit::simkit::trial_rng;
use muxkit::temporal::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn de_bruijn_windows_unique_up_to_4096_words() {
    for k in 1..=16usize {
        for l in 1..=12u32 {
            let words = k.pow(l);
            if words > 4096 || (k == 1 && l > 1) {
                continue;
            }
            let s = de_bruijn(k, l as usize).unwrap();
            assert_eq!(s.len(), words);
            assert!(window_oracle(&s.symbols, k, l as usize, false), "full ({k}, {l})");
            let r = reduced_de_bruijn(k, l as usize).unwrap();
            assert_eq!(r.len(), words - (k - 1).pow(l));
            assert!(window_oracle(&r.symbols, k, l as usize, true), "reduced ({k}, {l})");
        }
    }
}

#[test]
fn window_oracle_rejects_bad_sequences() {
    assert!(window_oracle(&[0, 0, 1, 1], 2, 2, false));
    assert!(!window_oracle(&[0, 1, 0, 1], 2, 2, false));
    assert!(!window_oracle(&[0, 0, 0, 1], 2, 2, false));
    assert!(!window_oracle(&[1, 1, 0], 2, 2, true));
    assert!(!window_oracle(&[0, 2], 2, 1, false));
}

fn weighted(counts: &[u64], p: f64) -> f64 {
    let n = counts.len() - 1;
    counts.iter().enumerate().map(|(k, &c)| c as f64 * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)).sum()
}

#[test]
fn single_configuration_matches_closed_form() {
    for reduced in [false, true] {
        let net = DelayNetwork::de_bruijn(4, 4, reduced).unwrap();
        let e = debruijn_pmux_exact(&net, 0.25, false).unwrap();
        assert!((e.p_mux - debruijn_pmux_single(4, 4, 0.25)).abs() < 1e-12, "{}", e.p_mux);
        assert_eq!(format!("{:.4}", e.p_mux), "0.2184");
    }
    // independent count: every mode has a nonempty 4-bit column
    let net = DelayNetwork::de_bruijn(3, 2, false).unwrap();
    let c = routable_counts(&net, false).unwrap();
    let brute: Vec<u64> = (0..=6).map(|k| (0u64..64).filter(|&x| x.count_ones() == k && (0..3).all(|j| x >> (2 * j) & 3 != 0)).count() as u64).collect();
    assert_eq!(c, brute);
}

#[test]
fn tetris_rescues_most_four_photon_windows() {
    let net = DelayNetwork::de_bruijn(4, 4, true).unwrap();
    let plain = routable_counts(&net, false).unwrap();
    let tetris = routable_counts(&net, true).unwrap();
    let p = weighted(&tetris, 0.25);
    assert!((p - 0.56).abs() <= 0.03, "{p}");
    // superset, strictly
    assert!(plain.iter().zip(&tetris).all(|(a, b)| a <= b));
    assert!(tetris.iter().sum::<u64>() > plain.iter().sum::<u64>());
    // fewer than four photons never route; "almost all" four-photon windows do
    assert!(tetris[..4].iter().all(|&c| c == 0));
    assert!(tetris[4] as f64 / 1820.0 > 0.5);
    // the gain grows as p falls
    let ratio = |p: f64| weighted(&tetris, p) / weighted(&plain, p);
    assert!(ratio(0.05) > ratio(0.1) && ratio(0.1) > ratio(0.25) && ratio(0.25) > ratio(0.5));
}

#[test]
fn full_and_reduced_networks_route_the_same_windows() {
    let full = DelayNetwork::de_bruijn(3, 3, false).unwrap();
    let red = DelayNetwork::de_bruijn(3, 3, true).unwrap();
    assert_eq!((full.ports(), red.ports()), (27, 19));
    for tetris in [false, true] {
        assert_eq!(routable_counts(&full, tetris).unwrap(), routable_counts(&red, tetris).unwrap());
    }
}

#[test]
fn exhaustive_witnesses_replay() {
    let net = DelayNetwork::de_bruijn(3, 3, true).unwrap();
    for code in 0u64..1 << 9 {
        let occ = SpaceTimeOccupancy::from_code(3, 3, code).unwrap();
        for tetris in [false, true] {
            if let Some(s) = debruijn_mux_route(&occ, &net, tetris).unwrap() {
                assert_eq!(replay_debruijn(&occ, &net, &s), Some(s.output_time));
            }
        }
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let net = DelayNetwork::de_bruijn(4, 4, true).unwrap();
    let (plain, tetris) = debruijn_pmux_mc(&net, 0.25, 20_000, 5).unwrap();
    let exact_plain = debruijn_pmux_exact(&net, 0.25, false).unwrap().p_mux;
    let exact_tetris = debruijn_pmux_exact(&net, 0.25, true).unwrap().p_mux;
    assert!(plain.within_sigma(exact_plain, 4.0));
    assert!(tetris.within_sigma(exact_tetris, 4.0));
}

#[test]
fn every_permutation_up_to_five_replays() {
    fn perms(r: usize) -> Vec<Vec<usize>> {
        if r == 0 {
            return vec![vec![]];
        }
        perms(r - 1)
            .into_iter()
            .flat_map(|p| (0..r).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, r - 1);
                q
            }))
            .collect()
    }
    for r in 1..=5 {
        let all = perms(r);
        assert_eq!(all.len(), (1..=r).product::<usize>());
        let mut times = std::collections::BTreeSet::new();
        for perm in all {
            let s = temporal_permutation(&perm).unwrap();
            assert_eq!(s.size, 2 * r - 1);
            assert_eq!(s.delays.iter().max(), Some(&(2 * (r - 1))));
            let out = replay_permutation(&s, &vec![true; r]).unwrap();
            assert_eq!(out.len(), r);
            for a in out {
                assert_eq!(a.output, perm[a.input]);
                times.insert(a.time);
            }
        }
        // all outputs, all permutations, one bin
        assert_eq!(times.into_iter().collect::<Vec<_>>(), vec![2 * r - 2]);
    }
}

#[test]
fn raster_monte_carlo_matches_closed_forms() {
    for (strategy, n, p) in [(RasterStrategy::I, 16, 0.1), (RasterStrategy::II, 32, 0.05), (RasterStrategy::III, 48, 0.05)] {
        let sim = raster_simulate(strategy, n, p, false, 100_000, 1, 17).unwrap();
        let want = raster_rate(strategy, n, p).unwrap();
        assert!(sim.groups.within_sigma(want, 3.0), "{strategy:?}: {} vs {want} (σ {})", sim.groups.mean, sim.groups.stderr);
    }
}

/// Exact expected number of greedy windows in `steps` Bernoulli(s) steps,
/// by dynamic programming over the current run length.
fn enhanced_expected(s: f64, w: usize, steps: usize) -> f64 {
    let mut dist = vec![0.0; w];
    dist[0] = 1.0;
    let mut groups = 0.0;
    for _ in 0..steps {
        let mut next = vec![0.0; w];
        for (run, &pr) in dist.iter().enumerate() {
            next[0] += pr * (1.0 - s);
            if run + 1 == w {
                groups += pr * s;
                next[0] += pr * s;
            } else {
                next[run + 1] += pr * s;
            }
        }
        dist = next;
    }
    groups
}

#[test]
fn enhanced_rastering_matches_run_length_oracle() {
    let (n, p) = (24u64, 0.05f64);
    let q = 1.0 - (1.0 - p).powi(n as i32);
    let sim = raster_simulate(RasterStrategy::I, n, p, true, 50_000, 4, 3).unwrap();
    let exact = enhanced_expected(q, 4, 16) / 4.0;
    assert!(sim.groups.within_sigma(exact, 3.0), "{} vs {exact}", sim.groups.mean);
    // and the long-run rate is the limit of the finite-horizon one
    let long = enhanced_expected(q, 4, 40_000) / 10_000.0;
    assert!((long - enhanced_raster_rate(RasterStrategy::I, n, p).unwrap()).abs() < 1e-4);
    // groups end in every step position
    assert!(sim.bin_histogram.iter().all(|&c| c > 0));
}

#[test]
fn enhanced_never_worse_than_regular() {
    let p = 0.05;
    for n in (8..=128).step_by(8) {
        let reg = raster_simulate(RasterStrategy::I, n, p, false, 20_000, 4, 99).unwrap();
        let enh = raster_simulate(RasterStrategy::I, n, p, true, 20_000, 4, 99).unwrap();
        assert!(enh.yield_estimate.mean >= reg.yield_estimate.mean, "N={n}");
        if n <= 48 {
            assert!(enh.yield_estimate.mean > reg.yield_estimate.mean, "N={n}");
        }
        assert!(enhanced_raster_rate(RasterStrategy::I, n, p).unwrap() >= raster_rate(RasterStrategy::I, n, p).unwrap());
    }
}

#[test]
fn spatiotemporal_groups() {
    let probs = spatiotemporal_group_probabilities(16, 16, 4, 2, 2, 4, 0.1, 4000, 8).unwrap();
    // P[≥k groups] is non-increasing in k
    assert!(probs.windows(2).all(|w| w[0].mean >= w[1].mean));
    assert!(probs[0].mean > 0.0);
    let mut rng = trial_rng(1, 0);
    let mut occ = SpaceTimeOccupancy::new(16, 16).unwrap();
    for t in 0..16 {
        for j in 0..16 {
            occ.set(j, t, rng.gen::<f64>() < 0.2);
        }
    }
    let groups = extract_groups(&occ, 4, 2, 2, 8).unwrap();
    let mut used = std::collections::HashSet::new();
    for g in &groups {
        assert!(replay_spatiotemporal(&occ, g, 2, 2));
        for (mode, &t) in g.modes(16).into_iter().zip(&g.bins) {
            assert!(used.insert((mode, t)), "photon reused");
        }
    }
}

proptest! {
    #[test]
    fn tetris_witness_replays(code in 0u64..(1 << 16), reduced in any::<bool>()) {
        let net = DelayNetwork::de_bruijn(4, 4, reduced).unwrap();
        let occ = SpaceTimeOccupancy::from_code(4, 4, code).unwrap();
        let plain = debruijn_mux_route(&occ, &net, false).unwrap();
        let tetris = debruijn_mux_route(&occ, &net, true).unwrap();
        if let Some(s) = &plain {
            prop_assert!(tetris.is_some());
            prop_assert_eq!(replay_debruijn(&occ, &net, s), Some(s.output_time));
        }
        if let Some(s) = &tetris {
            prop_assert_eq!(replay_debruijn(&occ, &net, s), Some(s.output_time));
            if !reduced {
                prop_assert_eq!(s.output_time, 3);
            }
        }
    }

    #[test]
    fn sort_to_top_packs_outputs(bits in 1u32..(1 << 8)) {
        let r = 8;
        let occ: Vec<bool> = (0..r).map(|i| bits >> i & 1 == 1).collect();
        let s = sort_to_top(&occ).unwrap();
        prop_assert_eq!(s.size, r);
        let out = replay_permutation(&s, &occ).unwrap();
        let mut outs: Vec<(usize, usize)> = out.iter().map(|a| (a.input, a.output)).collect();
        outs.sort_unstable();
        let k = bits.count_ones() as usize;
        // order preserved, outputs 0..k
        prop_assert_eq!(outs.iter().map(|x| x.1).collect::<Vec<_>>(), (0..k).collect::<Vec<_>>());
    }

    #[test]
    fn spatiotemporal_routes_replay(seed in any::<u64>(), p in 0.05f64..0.5) {
        let mut rng = trial_rng(seed, 0);
        let mut occ = SpaceTimeOccupancy::new(8, 6).unwrap();
        for t in 0..6 {
            for j in 0..8 {
                occ.set(j, t, rng.gen::<f64>() < p);
            }
        }
        if let Some(r) = spatiotemporal_debruijn(&occ, 3, 1, 1).unwrap() {
            prop_assert!(replay_spatiotemporal(&occ, &r, 1, 1));
        }
    }
}
