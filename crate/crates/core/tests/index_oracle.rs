mod common;

use atlab_core::{assembly_index_exact, assembly_index_split_branch, extract_paths, validate_space, ExactLimits, ObjectString};
use common::{all_strings, bfs_assembly_index};
use proptest::prelude::*;

fn o(s: &str) -> ObjectString {
    s.parse().unwrap()
}

fn exact(s: &str) -> usize {
    assembly_index_exact(&o(s), ExactLimits::default()).unwrap().index
}

#[test]
fn matches_bfs_on_small_binary_and_ternary_strings() {
    let mut set = all_strings(b"AB", 9);
    set.extend(all_strings(b"ABC", 6));
    for s in &set {
        assert_eq!(exact(s), bfs_assembly_index(s), "{s}");
    }
}

#[test]
fn named_examples_match_bfs() {
    for s in ["A", "AA", "BANANA", "ABRACADABRA", "ABABABAB", "AAAAAAAA"] {
        assert_eq!(exact(s), bfs_assembly_index(s), "{s}");
    }
    assert_eq!(exact("BANANA"), 4);
    assert_eq!(exact("ABRACADABRA"), 7);
}

#[test]
fn split_branch_bounds_exact_binary_up_to_ten() {
    for s in all_strings(b"AB", 10) {
        let x = o(&s);
        let c = exact(&s);
        let upper = assembly_index_split_branch(&x);
        assert!(c <= upper.index, "{s}");
        assert!(c < s.len());
        assert!(c >= s.len().next_power_of_two().trailing_zeros() as usize, "{s}");
        assert_eq!(upper.witness.replay().as_ref(), Some(&x));
    }
}

#[test]
fn witness_replays_and_paths_fit() {
    for s in all_strings(b"ABC", 5) {
        let w = assembly_index_exact(&o(&s), ExactLimits::default()).unwrap().witness;
        assert!(validate_space(&w.space).is_valid());
        assert_eq!(w.replay().unwrap().as_str(), s);
        let p = extract_paths(&w);
        assert!(p.gamma_min.len() <= p.gamma_max.len());
        assert!(p.gamma_max.len() <= w.index);
    }
}

#[test]
fn banana_paths() {
    let w = assembly_index_exact(&o("BANANA"), ExactLimits::default()).unwrap().witness;
    let p = extract_paths(&w);
    assert_eq!(p.gamma_max.len(), 4);
    assert!(p.gamma_min.len() <= 4);
}

#[test]
fn over_length_is_refused() {
    let x = o(&"AB".repeat(9));
    assert!(assembly_index_exact(&x, ExactLimits::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn split_branch_is_valid_on_long_strings(s in "[01]{1,64}|[ABC]{1,64}") {
        let x = o(&s);
        let r = assembly_index_split_branch(&x);
        prop_assert!(validate_space(&r.witness.space).is_valid());
        prop_assert_eq!(r.witness.replay(), Some(x));
        prop_assert_eq!(r.index, r.witness.index);
    }

    #[test]
    fn exact_is_deterministic_and_below_split_branch(s in "[AB]{1,12}|[ABC]{1,10}") {
        let x = o(&s);
        let a = assembly_index_exact(&x, ExactLimits::default()).unwrap();
        let b = assembly_index_exact(&x, ExactLimits::default()).unwrap();
        prop_assert_eq!(&a.witness, &b.witness);
        prop_assert!(a.index <= assembly_index_split_branch(&x).index);
    }
}
