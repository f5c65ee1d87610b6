use proptest::prelude::*;
use relhyp_core::amalgam::{normal_form, rho, AmalgamSpec, Side};
use relhyp_core::quasiconvex::SubgroupSpec;
use relhyp_core::relcayley::{rel_distance, rel_geodesics};
use relhyp_core::{Caps, Element, GroupSpec, Lattice, RawLetter};

fn desk() -> GroupSpec {
    GroupSpec::desk()
}

/// Words over `a, b, t` with exponents in `-3..=3`, plus peripheral letters.
fn raw_word() -> impl Strategy<Value = Vec<RawLetter>> {
    let named = (prop::sample::select(vec!["a", "b", "t"]), -3i64..=3).prop_map(|(n, e)| RawLetter::named_pow(n, e));
    let peripheral = (-4i64..=4, -4i64..=4).prop_map(|(x, y)| RawLetter::Peripheral {
        factor: 0,
        vector: vec![x, y],
    });
    prop::collection::vec(prop_oneof![3 => named, 1 => peripheral], 0..8)
}

fn element() -> impl Strategy<Value = Element> {
    raw_word().prop_map(|w| desk().normalize(&w).unwrap())
}

fn amalgam() -> AmalgamSpec {
    let g = desk();
    let q = SubgroupSpec::from_generators(&g, "Q", vec![g.parse_word("t").unwrap()]).unwrap();
    let r = SubgroupSpec::peripheral_lattice(&g, "R", 0, Lattice::scaled_axes(2, &[3, 3])).unwrap();
    AmalgamSpec::theorem1(&g, q, r, 3).unwrap()
}

fn amalgam_letters() -> impl Strategy<Value = Vec<(Side, Element)>> {
    let left = (-2i64..=2).prop_map(|e| (0 as Side, Element::free(0, e)));
    let right = (-2i64..=2, -2i64..=2).prop_map(|(x, y)| (1 as Side, Element::peripheral(0, vec![3 * x, 3 * y])));
    prop::collection::vec(prop_oneof![left, right], 0..6)
}

proptest! {
    #[test]
    fn group_axioms(x in element(), y in element(), z in element()) {
        let one = Element::identity();
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&one), x.clone());
        prop_assert_eq!(one.mul(&x), x.clone());
        prop_assert!(x.mul(&x.inverse()).is_identity());
        prop_assert_eq!(x.inverse().inverse(), x);
    }

    #[test]
    fn lengths_are_subadditive(x in element(), y in element()) {
        let xy = x.mul(&y);
        prop_assert!(xy.x_length() <= x.x_length() + y.x_length());
        prop_assert!(rel_distance(&xy) <= rel_distance(&x) + rel_distance(&y));
        prop_assert!(rel_distance(&x) <= x.x_length());
        prop_assert_eq!(rel_distance(&x), rel_distance(&x.inverse()));
    }

    #[test]
    fn normalize_is_idempotent(w in raw_word()) {
        let g = desk();
        let x = g.normalize(&w).unwrap();
        prop_assert_eq!(g.parse_word(&g.format(&x)).unwrap(), x.clone());
        let w2 = [w.clone(), w].concat();
        prop_assert_eq!(g.normalize(&w2).unwrap(), x.mul(&x));
    }

    #[test]
    fn geodesics_reach_their_endpoint(x in element()) {
        let g = desk();
        for p in rel_geodesics(&x, Caps::default().geodesics).unwrap() {
            prop_assert_eq!(p.len() as u64, rel_distance(&x));
            prop_assert_eq!(p.end(&g), x.clone());
        }
    }

    #[test]
    fn amalgam_normal_form_is_associative(u in amalgam_letters(), v in amalgam_letters(), w in amalgam_letters()) {
        let g = desk();
        let spec = amalgam();
        let nf = |l: &[(Side, Element)]| normal_form(&g, &spec, l).unwrap();
        let left = nf(&[nf(&[nf(&u).letters, nf(&v).letters].concat()).letters, nf(&w).letters].concat());
        let right = nf(&[nf(&u).letters, nf(&[nf(&v).letters, nf(&w).letters].concat()).letters].concat());
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&nf(&left.letters), &left);
        let image = rho(&spec, &nf(&u)).mul(&rho(&spec, &nf(&v))).mul(&rho(&spec, &nf(&w)));
        prop_assert_eq!(rho(&spec, &left), image);
    }

    #[test]
    fn lattice_reduction_stays_in_coset(x in -50i64..50, y in -50i64..50, p in 1i64..6, q in 1i64..6) {
        let l = Lattice::new(2, &[vec![p, 0], vec![1, q]]).unwrap();
        let r = l.reduce(&[x, y]);
        prop_assert!(l.contains(&[x - r[0], y - r[1]]));
        prop_assert_eq!(l.reduce(&r), r);
        prop_assert_eq!(l.index(), Some((p * q) as u64));
    }
}
