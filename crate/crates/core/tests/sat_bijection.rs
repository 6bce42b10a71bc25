use std::collections::HashSet;

use atlab_core::sat::{damg_bounds, CanonicalEnumerator, SatError, DEFAULT_BUDGET};
use atlab_core::validate_space;
use num_bigint::BigUint;

#[test]
fn enumeration_is_a_bijection_up_to_height_three() {
    let mut en = CanonicalEnumerator::new(DEFAULT_BUDGET);
    for height in 1..=3usize {
        for basis in [&b"A"[..], b"AB", b"ABC"] {
            let mut t = 0u32;
            let mut seen = HashSet::new();
            for extra in 0..=(1usize << height) - 1 - height {
                let class = en.class(height, basis, extra).unwrap().to_vec();
                for st in class {
                    t += 1;
                    assert!(seen.insert(st.edges.clone()), "duplicate structure at t={t}");
                    let w = st.to_witness();
                    assert!(validate_space(&w.space).is_valid());
                    assert_eq!(w.index, height + extra);
                    assert_eq!(st.height(), height);
                    assert_eq!(en.rank(&st).unwrap(), BigUint::from(t));
                    assert_eq!(en.unrank(height, basis, &BigUint::from(t)).unwrap(), st);
                }
            }
            // A height-L object has at most 2^L symbols, so it uses every basis
            // symbol only when |B| ≤ 2^L.
            assert_eq!(t > 0, basis.len() <= 1 << height, "height {height}, basis {basis:?}");
            assert!(matches!(
                en.unrank(height, basis, &BigUint::from(t + 1)),
                Err(SatError::TOutOfRange { .. })
            ));
        }
    }
}

#[test]
fn bounds_grow_with_height() {
    assert_eq!(damg_bounds(1, 2).max_vertices, BigUint::from(8u32));
    assert_eq!(damg_bounds(1, 2).max_edges, BigUint::from(512u32));
    assert_eq!(damg_bounds(2, 2).max_vertices, BigUint::from(16u32));
    assert_eq!(damg_bounds(2, 2).max_edges, BigUint::from(4096u32));
    assert_eq!(damg_bounds(1, 2).log2_max_t, 513.0);
    for l in 1..6 {
        let (a, b) = (damg_bounds(l, 3), damg_bounds(l + 1, 3));
        assert!(a.max_vertices < b.max_vertices && a.max_edges < b.max_edges && a.log2_max_t < b.log2_max_t);
    }
}
