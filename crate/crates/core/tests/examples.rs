//! Worked values across module boundaries, through the public API only.

use glfamily::homo::{lemma26_find, scheme_instance};
use glfamily::seq::theta_global;
use glfamily::suites::stages::build_reference_scheme;
use glfamily::{BinWord, Exec, Family, FamilyLevel, Index, LazyPoint, SymbolicClopen};

fn w(s: &str) -> BinWord {
    s.parse().unwrap()
}

#[test]
fn global_theta_values() {
    let lv = |l| FamilyLevel::new(l).unwrap();
    assert_eq!(theta_global(lv(1), &Index::from(4u64)).unwrap(), Index::from(9u64));
    assert_eq!(theta_global(lv(2), &Index::from(5u64)).unwrap(), Index::from(15u64));
    assert_eq!(theta_global(lv(2), &Index::from(25u64)).unwrap(), Index::from(72u64));
}

#[test]
fn coordinates_of_images() {
    let fam = Family::g1();
    let a = LazyPoint::from_word(&w("00"), false).with(7u64, true);
    assert!(fam.g_eval_coord(0, &a, &Index::from(1u64)).unwrap());
    assert!(!fam.g_eval_coord(0, &a, &Index::from(0u64)).unwrap());
    // θ_1(16) = 40
    let b = LazyPoint::from_word(&w("000000000"), false);
    for bit in [false, true] {
        let p = b.clone().with(40u64, bit);
        assert_eq!(fam.g_eval_coord(1, &p, &Index::from(16u64)).unwrap(), bit);
    }
    assert!(fam.g_eval_coord(0, &LazyPoint::constant(true), &Index::from(3u64)).is_err());
}

#[test]
fn first_witness_on_the_full_space() {
    let inst = scheme_instance();
    let found = lemma26_find(&inst, &SymbolicClopen::full(), None).unwrap();
    assert_eq!(found.n, 0);
    assert!(found.v0.is_subset_of(&SymbolicClopen::cylinder(w("00"))));
    for m in [None, Some(0)] {
        if let Ok(f) = lemma26_find(&inst, &SymbolicClopen::full(), m) {
            assert!(m.is_none_or(|m| f.n > m));
        }
    }
}

#[test]
fn scheme_first_split_is_disjoint() {
    let (states, scheme) = build_reference_scheme(2, 1 << 14, Exec::Sequential).unwrap();
    let st = &states[1];
    let s = scheme.iter().find(|s| s.level == 1).unwrap();
    let cell = |word: &str| {
        let i = (0..st.len() as u32).find(|&i| st.word(i) == w(word)).unwrap();
        s.cells[i as usize].clone()
    };
    assert!(cell("0").meet(&cell("1")).is_none());
}
