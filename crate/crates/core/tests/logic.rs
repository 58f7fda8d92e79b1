use muxkit::analytics::choose;
use muxkit::logic::*;
use muxkit::patterns::{bsg_usable_patterns, ghz_best_layer, ghz_usable_patterns, search_single_mzi_layer};
use proptest::prelude::*;

fn first_ones(x: u64, n: usize) -> Vec<usize> {
    (0..64).filter(|&i| x >> i & 1 == 1).take(n).collect()
}

#[test]
fn wildcard_tables_complete_and_conflict_free() {
    for width in 1..=12usize {
        for n in 0..=width {
            // outputs encode the chosen ports, so a wrong match is visible
            let t = wildcard_reduce(width, n, |ones| Some((0..width).map(|i| ones.contains(&i)).collect())).unwrap();
            assert_eq!(t.rows.len() as u128, choose(width as u64, n as u64));
            assert!(t.is_conflict_free().unwrap());
            for x in 0u64..1 << width {
                let hits = t.matching_rows(x);
                if (x.count_ones() as usize) < n {
                    assert_eq!(hits, 0);
                    assert_eq!(t.lookup(x), &t.default_outputs[..]);
                } else {
                    assert_eq!(hits, 1, "width {width}, n {n}, input {x:b}");
                    let out = t.lookup(x);
                    let chosen: Vec<usize> = (0..width).filter(|&i| out[i]).collect();
                    assert_eq!(chosen, first_ones(x, n));
                    // blocked ports are exactly those after the last chosen one
                    let last = chosen.last().map_or(0, |l| l + 1);
                    assert!((0..width).all(|i| out[width + i] == (i >= last)));
                }
            }
        }
    }
}

#[test]
fn row_count_reduction() {
    assert_eq!(wildcard_row_count(4, 2), (6, 16));
    assert_eq!(wildcard_row_count(32, 4), (35960, 1 << 32));
}

#[test]
fn generator_tables_list_only_routable_patterns() {
    let (layer, _) = search_single_mzi_layer(8, 4, &bsg_usable_patterns()).unwrap();
    let t = layer_routing_table(&layer, 4, &bsg_usable_patterns()).unwrap();
    assert_eq!((t.rows.len(), t.width), (66, 8));
    assert!(t.is_conflict_free().unwrap());
    assert_eq!(t.output_names[0], "mzi0_1");
    let (layer, _) = ghz_best_layer();
    let t = layer_routing_table(layer, 6, &ghz_usable_patterns()).unwrap();
    assert_eq!(t.rows.len(), 666);
    assert!(t.is_conflict_free().unwrap());
}

proptest! {
    #[test]
    fn priority_matches_scan(x in any::<u64>()) {
        let naive = (0..64).find(|&i| x >> i & 1 == 1);
        prop_assert_eq!(priority_encode(x), naive);
    }
}
