use proptest::prelude::*;

use glfamily::cylinder::{Atom, ClopenBuilder};
use glfamily::digraph::sum_tag_set;
use glfamily::uogas::{default_enumeration, duplicate_indexed, predicted_size, IndexedUogas, Stage};
use glfamily::{BinWord, Family, FamilyLevel, Index, LazyPoint, SymbolicClopen, ThetaRule};

fn rule(l: usize) -> ThetaRule {
    ThetaRule::new(FamilyLevel::new(l).unwrap())
}

fn word() -> impl Strategy<Value = BinWord> {
    prop::collection::vec(any::<bool>(), 0..12).prop_map(BinWord::from_bits)
}

fn clopen() -> impl Strategy<Value = Option<SymbolicClopen>> {
    let atom = prop_oneof![
        (0u64..16, any::<bool>()).prop_map(|(a, v)| Atom::Fix(a, v)),
        (0u64..16, 0u64..16, any::<bool>()).prop_map(|(a, b, d)| Atom::Rel(a, b, d)),
    ];
    (word(), prop::collection::vec(atom, 0..4)).prop_map(|(w, atoms)| {
        let mut b = ClopenBuilder::new(w);
        for a in atoms {
            b.atom(a);
        }
        b.build()
    })
}

fn point_bits(bits: u32) -> LazyPoint {
    LazyPoint::from_word(&BinWord::from_bits((0..16).map(|i| bits >> i & 1 == 1)), false)
}

/// A random uogas from a parent choice per vertex.
fn uogas(max: usize) -> impl Strategy<Value = IndexedUogas> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<u32>(), n).prop_map(move |r| {
            let succ = (0..n).map(|i| if i == 0 || r[i] % 3 == 0 { None } else { Some(r[i] % i as u32) }).collect();
            IndexedUogas::from_valid_succ(succ)
        })
    })
}

proptest! {
    #[test]
    fn theta_n_round_trips(l in 1usize..=3, n in 0usize..=2, k in any::<u64>()) {
        let r = rule(l);
        let v = r.theta_n(n, &Index::from(k));
        prop_assert_eq!(r.theta_n_inv(n, &v), Some(Index::from(k)));
    }

    #[test]
    fn theta_n_moves_only_sn(l in 1usize..=3, n in 0usize..=2, k in 1u64..1 << 40) {
        let r = rule(l);
        let k = Index::from(k);
        let moved = r.theta_n(n, &k) != k;
        prop_assert_eq!(moved, glfamily::seq::in_s(n, &k));
    }

    #[test]
    fn theta_n_is_injective(l in 1usize..=3, n in 0usize..=2, a in any::<u32>(), b in any::<u32>()) {
        prop_assume!(a != b);
        let r = rule(l);
        prop_assert_ne!(r.theta_n(n, &Index::from(a)), r.theta_n(n, &Index::from(b)));
    }

    #[test]
    fn big_shifts_keep_residues(e in 0u64..4000, m in 1u64..1_000_000) {
        let x = Index::pow2(e + 200);
        let want = num_bigint::BigUint::from(2u32).modpow(&num_bigint::BigUint::from(e + 200), &m.into());
        prop_assert_eq!(num_bigint::BigUint::from(x.rem_u64(m)), want);
    }

    #[test]
    fn words_display_and_parse(w in word()) {
        let back: BinWord = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn clopens_display_and_parse(c in clopen()) {
        if let Some(c) = c {
            let back: SymbolicClopen = c.to_string().parse().unwrap();
            prop_assert_eq!(back, c);
        }
    }

    #[test]
    fn meet_is_intersection(a in clopen(), b in clopen(), bits in any::<u32>()) {
        let (Some(a), Some(b)) = (a, b) else { return Ok(()) };
        let p = point_bits(bits);
        let inside = a.meet(&b).is_some_and(|m| m.contains(&p));
        prop_assert_eq!(inside, a.contains(&p) && b.contains(&p));
    }

    #[test]
    fn minus_partitions(a in clopen(), b in clopen(), bits in any::<u32>()) {
        let (Some(a), Some(b)) = (a, b) else { return Ok(()) };
        let p = point_bits(bits);
        let hits = a.minus(&b).iter().filter(|c| c.contains(&p)).count();
        prop_assert_eq!(hits, usize::from(a.contains(&p) && !b.contains(&p)));
    }

    #[test]
    fn preimage_of_image_covers(n in 0usize..=1, c in clopen()) {
        let fam = Family::g1();
        let Some(c) = c.and_then(|c| c.meet(&fam.domain(n).unwrap())) else { return Ok(()) };
        let img = fam.image(n, &c).unwrap();
        let back = fam.preimage(n, &img).unwrap().expect("the image is reached");
        prop_assert!(c.is_subset_of(&back), "{} ⊄ {}", c, back);
    }

    #[test]
    fn image_contains_images_of_points(n in 0usize..=1, c in clopen(), bits in any::<u32>()) {
        let fam = Family::g1();
        let Some(c) = c.and_then(|c| c.meet(&fam.domain(n).unwrap())) else { return Ok(()) };
        let mut p = point_bits(bits);
        // move the point into the domain where c pins it
        for (i, b) in c.base().iter().enumerate() {
            p.set(i as u64, b);
        }
        prop_assume!(c.contains(&p));
        let img = fam.image(n, &c).unwrap();
        prop_assert!(img.contains(&fam.g_point(n, &p).unwrap()));
    }

    #[test]
    fn tag_prefixes_agree_with_words(a in word(), b in word()) {
        let (ta, tb) = (sum_tag_set(&a), sum_tag_set(&b));
        let common = ta.iter().zip(&tb).take_while(|(x, y)| x == y).count();
        prop_assert_eq!(common, a.lcp(&b).min(ta.len()).min(tb.len()));
    }

    #[test]
    fn unique_paths_walk_edges(g in uogas(12), x in any::<u32>(), y in any::<u32>()) {
        let n = g.len() as u32;
        let (x, y) = (x % n, y % n);
        if let Ok(p) = g.unique_path(x, y) {
            prop_assert_eq!(p.first(), Some(&x));
            prop_assert_eq!(p.last(), Some(&y));
            for w in p.windows(2) {
                prop_assert!(g.has_edge(w[0], w[1]) || g.has_edge(w[1], w[0]));
            }
        } else {
            prop_assert_ne!(g.comp_max(x), g.comp_max(y));
        }
    }

    #[test]
    fn duplication_size_is_predicted(g in uogas(6)) {
        let ord = default_enumeration(&g);
        let st = duplicate_indexed(&g, &ord, Stage::Full(g.len() - 1)).unwrap();
        prop_assert_eq!(st.vertices.len() as u128, predicted_size(&g));
        prop_assert!(st.validate().is_empty());
    }
}
