use muxkit::analytics::*;
use muxkit::simkit::estimate_many;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn choose_matches_pascal() {
    let mut row = vec![1u128];
    for n in 1..=60u64 {
        let mut next = vec![1u128; n as usize + 1];
        for k in 1..n as usize {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
        for (k, &c) in row.iter().enumerate() {
            assert_eq!(choose(n, k as u64), c, "C({n},{k})");
        }
    }
}

#[test]
fn group_pmux_against_monte_carlo() {
    // N = 24 sources at p = 0.1, groups of four
    let (n, p, m) = (24u64, 0.1, 4u64);
    let est = estimate_many(40_000, 3, 2, |rng, _, out| {
        let fired: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < p).collect();
        let total = fired.iter().filter(|&&f| f).count() as u64;
        out[0] = f64::from(u8::from(total >= m));
        out[1] = f64::from(u8::from(fired.chunks(6).all(|c| c.iter().any(|&f| f))));
    })
    .unwrap();
    assert!(est[0].within_sigma(optimal_group_pmux(n, p, m).unwrap(), 4.0));
    assert!(est[1].within_sigma(naive_group_pmux(n, p, m).unwrap(), 4.0));
}

#[test]
fn yield_without_sharing_by_direct_sum() {
    for &(l, m, g) in &[(4.0, 4u64, 1u64), (8.0, 4, 2), (10.0, 4, 3)] {
        let per = l / g as f64;
        // P[Poisson(per) ≥ m] from the pmf
        let mut pmf = (-per).exp();
        let mut below = 0.0;
        for k in 0..m {
            below += pmf;
            pmf *= per / (k + 1) as f64;
        }
        let want = m as f64 * g as f64 * (1.0 - below) / l;
        assert!((yield_multi_generator(l, m, g, false).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn yield_maxima_against_grid_scan() {
    for g in 1..=3u64 {
        let (x, y) = yield_max(4, g, true).unwrap();
        let scan = (1..5000).map(|i| i as f64 * 0.01).map(|l| yield_multi_generator(l, 4, g, true).unwrap()).fold(0.0, f64::max);
        assert!(y >= scan - 1e-6 && y - scan < 1e-4, "g={g}: {y} vs {scan}");
        assert!(x > 0.0);
    }
}

#[test]
fn raster_crossover_is_a_root() {
    for p in [0.02, 0.05, 0.1] {
        let n = raster_crossover(p).unwrap();
        let cont = |m: f64| m * (1.0 - (1.0 - p).powf(n / m)).powi(4);
        assert!((cont(1.0) - cont(4.0)).abs() < 1e-9, "p={p}");
    }
}

#[test]
fn binomial_tail_against_pmf_sum() {
    for &(n, p) in &[(10u64, 0.3), (48, 0.05), (200, 0.5)] {
        for k in 0..=n.min(30) {
            let want: f64 = (k..=n).map(|j| binomial_pmf(n, p, j)).sum();
            assert!((binomial_sf(n, p, k).unwrap() - want).abs() < 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn bsg_probability_interpolates() {
    assert_eq!(p_bsg(8).unwrap(), BSG_SMALL);
    let mut last = 1.0;
    for n in (8..=512).step_by(8) {
        let v = p_bsg(n).unwrap();
        assert!(v <= last && v > BSG_LARGE);
        last = v;
    }
    assert!(p_bsg(7).is_err() && p_bsg(6).is_err());
}

proptest! {
    #[test]
    fn sharing_never_hurts(l in 0.5f64..30.0, m in 1u64..6, g in 1u64..5) {
        let with = yield_multi_generator(l, m, g, true).unwrap();
        let without = yield_multi_generator(l, m, g, false).unwrap();
        prop_assert!(with >= without - 1e-12);
        prop_assert!(with <= 1.0 + 1e-12);
    }

    #[test]
    fn optimal_routing_dominates_naive(k in 1u64..8, m in 1u64..5, p in 0.01f64..0.9) {
        let n = k * m;
        prop_assert!(optimal_group_pmux(n, p, m).unwrap() >= naive_group_pmux(n, p, m).unwrap() - 1e-12);
    }

    #[test]
    fn raster_rates_bounded(n in 1u64..32, p in 0.0f64..1.0) {
        for s in RasterStrategy::ALL {
            let r = raster_rate(s, 4 * n, p).unwrap();
            prop_assert!(r >= 0.0 && r <= s.muxes() as f64 + 1e-12);
        }
    }
}
