use atlab_core::ensemble::{
    assembly_number, catalog_from_json, catalog_measure, ensemble_prefix_code, is_prefix_free, simulate_selection, Ensemble,
    Item, SelectionConfig,
};
use proptest::prelude::*;

fn items() -> impl Strategy<Value = Vec<Item>> {
    prop::collection::btree_map("[AB]{1,6}", (1u64..20, 0usize..8), 1..8).prop_map(|m| {
        m.into_iter()
            .map(|(o, (copies, index))| Item { object: o.parse().unwrap(), copies, index, exact: true })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn invariant_under_permutation(mut its in items(), rot in 0usize..8) {
        let a = assembly_number(&Ensemble::new(its.clone()).unwrap());
        let k = rot % its.len();
        its.rotate_left(k);
        its.reverse();
        let b = assembly_number(&Ensemble::new(its).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn scaling_copies_follows_the_formula(its in items(), m in 2u64..6) {
        let scaled: Vec<Item> = its.iter().map(|i| Item { copies: i.copies * m, ..i.clone() }).collect();
        let e = Ensemble::new(scaled).unwrap();
        let nt = e.total() as f64;
        let expected: f64 = its.iter().map(|i| (i.index as f64).exp() * ((i.copies * m) as f64 - 1.0) / nt).sum();
        let got = assembly_number(&e);
        prop_assert!((got - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn zero_iff_single_copies(its in items()) {
        let a = assembly_number(&Ensemble::new(its.clone()).unwrap());
        prop_assert_eq!(a == 0.0, its.iter().all(|i| i.copies == 1));
    }

    #[test]
    fn catalog_code_is_prefix_free(cat in prop::collection::vec(items(), 1..12)) {
        let catalog: Vec<Ensemble> = cat
            .into_iter()
            .map(|mut its| { its[0].copies += 1; Ensemble::new(its).unwrap() })
            .collect();
        let code = ensemble_prefix_code(&catalog, &catalog_measure(&catalog)).unwrap();
        prop_assert!(code.kraft_sum <= 1.0 + 1e-12);
        let words: Vec<String> = code.entries.iter().map(|e| e.codeword.clone()).collect();
        prop_assert!(is_prefix_free(&words));
        for e in &code.entries {
            prop_assert_eq!(e.codeword.len(), e.length as usize);
        }
    }
}

#[test]
fn simulation_is_reproducible() {
    for bias in [0.0, 1.5, 4.0] {
        let cfg = SelectionConfig::binary(200, bias, 99);
        let a = serde_json::to_string(&simulate_selection(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&simulate_selection(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
    let one = simulate_selection(&SelectionConfig::binary(1, 0.0, 5)).unwrap();
    assert_eq!(one.items.len(), 1);
    assert_eq!(one.items[0].object.len(), 2);
}

#[test]
fn catalog_json_forms() {
    let single = r#"{"items":[{"object":"BANANA","copies":3}]}"#;
    let cat = catalog_from_json(single).unwrap();
    assert_eq!(cat[0].items[0].index, 4);
    let listed = format!("[{single},{single}]");
    assert_eq!(catalog_from_json(&listed).unwrap().len(), 2);
    let wrapped = format!(r#"{{"ensembles":[{single}]}}"#);
    assert_eq!(catalog_from_json(&wrapped).unwrap().len(), 1);
    assert!(catalog_from_json(r#"{"items":[]}"#).is_err());
}
