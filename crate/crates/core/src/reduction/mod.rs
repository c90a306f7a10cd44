//! The constructions turning a pair of submonoids or a rational subset of `G`
//! into a section of a finitely generated submonoid of `G × H`, and the
//! translation of witnesses in both directions.

mod bundle;
mod construct;
pub mod lattice;
pub mod shapes;
mod witness;

pub use bundle::{BundleGenerator, Origin, ReductionBundle, Variant};
pub use construct::{
    lattice_edge, mon_to_rat, pair_from_json, pair_to_rat, reduce_pair, state_image_order,
    tighter_aut, wreath_order, MonToRatOptions, PairToRatOutput,
};
pub use lattice::{
    find_trivial_stabilizer_vector, invariant_inner_product, orbit_size, signed_permutation_group,
    GramMatrix, TrivialStabVector,
};
pub use shapes::{check_path_shape, check_vla_shape, check_xsy_shape, XsyLetter};
pub use witness::{path_to_witness, reduce_pair_witness, witness_to_path};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::groups::{
        build_prop3_group, wreath_basis, wreath_edge, wreath_shift, Element as E, GeneratorWord,
        GroupSpec, XsyChoice,
    };
    use crate::oracle::SearchConfig;
    use crate::rational::{Automaton, PathWitness, Transition};

    fn z() -> GroupSpec {
        GroupSpec::FreeAbelian { rank: 1 }
    }

    fn zi(k: i64) -> E {
        E::FreeAbelian(vec![k])
    }

    fn loop_automaton() -> Automaton {
        Automaton::new(
            z(),
            1,
            0,
            [0],
            vec![Transition {
                from: 0,
                label: zi(1),
                to: 0,
            }],
        )
        .unwrap()
    }

    fn g_parts(hits: &[crate::oracle::SectionHit]) -> Vec<i64> {
        let mut out: Vec<i64> = hits
            .iter()
            .map(|h| match &h.element {
                E::FreeAbelian(v) => v[0],
                other => panic!("{other:?}"),
            })
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn pair_generators_and_section() {
        let b = reduce_pair(&z(), &[zi(2)], &[zi(3)], XsyChoice::Rotation).unwrap();
        let h = build_prop3_group();
        let expected = vec![
            E::Product(vec![zi(2), h.x.clone()]),
            E::Product(vec![zi(0), h.x.clone()]),
            E::Product(vec![zi(0), h.s.clone()]),
            E::Product(vec![zi(3), h.y.clone()]),
            E::Product(vec![zi(0), h.y.clone()]),
        ];
        assert_eq!(b.elements(), expected);
        assert_eq!(b.target, h.s);
        let origins: Vec<_> = b.generators.iter().map(|g| g.origin).collect();
        assert_eq!(
            origins,
            [
                Origin::ALetter,
                Origin::ALetter,
                Origin::Separator,
                Origin::BLetter,
                Origin::BLetter
            ]
        );

        let hits = b.section_bounded(&SearchConfig::new(7)).unwrap();
        let five = hits.iter().find(|h| h.element == zi(5)).unwrap();
        assert_eq!(five.length, 3);
        assert_eq!(five.witness, GeneratorWord::positive([0, 2, 3]));
        assert!(hits.iter().all(|h| h.element != zi(1)));

        let target = b.ambient_target(&zi(5)).unwrap();
        let r = b.member_bounded(&target, &SearchConfig::new(7)).unwrap();
        assert!(r.found());
        assert_eq!(r.witness.unwrap().len(), 3);
    }

    #[test]
    fn pair_section_matches_numerical_semigroup() {
        let b = reduce_pair(&z(), &[zi(2)], &[zi(3)], XsyChoice::Rotation).unwrap();
        // a witness of length 2k+1 holds k copies of 2 and k of 3 at most
        let hits = b.section_bounded(&SearchConfig::new(9)).unwrap();
        let mut brute = vec![];
        for i in 0..=4 {
            for j in 0..=4 {
                brute.push(2 * i + 3 * j);
            }
        }
        brute.sort_unstable();
        brute.dedup();
        assert_eq!(g_parts(&hits), brute);
    }

    #[test]
    fn empty_pair() {
        let b = reduce_pair(&z(), &[], &[], XsyChoice::Rotation).unwrap();
        assert_eq!(b.len(), 3);
        let hits = b.section_bounded(&SearchConfig::new(9)).unwrap();
        assert_eq!(g_parts(&hits), vec![0]);
    }

    #[test]
    fn pair_rejects_foreign_elements() {
        let err = reduce_pair(
            &z(),
            &[E::FreeAbelian(vec![1, 2])],
            &[],
            XsyChoice::Rotation,
        );
        assert!(matches!(err, Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn pair_witness_pads_shorter_side() {
        let b = reduce_pair(&z(), &[zi(2)], &[zi(3)], XsyChoice::Rotation).unwrap();
        let w = reduce_pair_witness(&b, &[zi(2), zi(2)], &[zi(3)]).unwrap();
        assert_eq!(w, GeneratorWord::positive([0, 0, 2, 3, 4]));
        let v = b.ambient.evaluate_word(&b.elements(), &w).unwrap();
        assert_eq!(v, b.ambient_target(&zi(7)).unwrap());
    }

    #[test]
    fn pair_to_rat_loop() {
        let out = pair_to_rat(&loop_automaton(), false).unwrap();
        assert_eq!(out.t.len(), 2);
        assert_eq!(
            out.t,
            vec![
                E::Product(vec![zi(1), wreath_edge(2, 0, 0)]),
                E::Product(vec![zi(0), wreath_edge(2, 0, 1)]),
            ]
        );
        let h1 = GroupSpec::Wreath { n: 2 };
        assert_eq!(
            out.y,
            E::Product(vec![zi(0), h1.invert(&wreath_basis(2, 0)).unwrap()])
        );
        assert_eq!(out.bundle.target, wreath_shift(2, 1));

        let hits = out.bundle.section_bounded(&SearchConfig::new(8)).unwrap();
        let three = hits.iter().find(|h| h.element == zi(3)).unwrap();
        // y^4 then three loops and the closing edge
        assert_eq!(
            three.witness,
            GeneratorWord::positive([0, 0, 0, 0, 1, 1, 1, 2])
        );
        let path = witness_to_path(&out.bundle, &three.witness).unwrap();
        assert_eq!(path, PathWitness(vec![0, 0, 0, 1]));
        assert_eq!(path_to_witness(&out.bundle, &path).unwrap(), three.witness);
    }

    #[test]
    fn pair_to_rat_pads_to_power_of_two() {
        let two = Automaton::new(z(), 2, 0, [1], vec![]).unwrap();
        assert_eq!(wreath_order(2, false), 3);
        let out = pair_to_rat(&two, true).unwrap();
        assert_eq!(
            out.bundle.ambient.factors().unwrap()[1],
            GroupSpec::Wreath { n: 4 }
        );
    }

    #[test]
    fn pair_to_rat_rejects_out_of_order_words() {
        let out = pair_to_rat(&loop_automaton(), false).unwrap();
        let w = GeneratorWord::positive([0, 2, 0]);
        assert!(matches!(
            witness_to_path(&out.bundle, &w),
            Err(Error::MalformedWitness(_))
        ));
    }

    #[test]
    fn mon_to_rat_loop() {
        let b = mon_to_rat(&loop_automaton(), MonToRatOptions::default()).unwrap();
        assert_eq!(b.len(), 4);
        let h = build_prop3_group();
        assert_eq!(b.target, E::Product(vec![wreath_shift(2, 1), h.s.clone()]));

        let p = PathWitness(vec![0, 1]);
        let w = path_to_witness(&b, &p).unwrap();
        assert_eq!(w, GeneratorWord::positive([0, 0, 1, 2, 3]));
        let v = b.ambient.evaluate_word(&b.elements(), &w).unwrap();
        assert_eq!(v, b.ambient_target(&zi(1)).unwrap());
        assert_eq!(witness_to_path(&b, &w).unwrap(), p);

        let r = b
            .member_bounded(&b.ambient_target(&zi(1)).unwrap(), &SearchConfig::new(9))
            .unwrap();
        assert_eq!(r.witness.unwrap().len(), 5);
    }

    #[test]
    fn mon_to_rat_loop_section() {
        let b = mon_to_rat(&loop_automaton(), MonToRatOptions::default()).unwrap();
        let hits = b.section_bounded(&SearchConfig::new(9)).unwrap();
        // labels of paths with at most 4 edges, the closing edge included
        let labels = b.source.as_ref().unwrap().enumerate_path_labels(4).unwrap();
        let mut expected: Vec<i64> = labels
            .iter()
            .map(|l| match &l.element {
                E::FreeAbelian(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        expected.sort_unstable();
        assert_eq!(expected, vec![0, 1, 2, 3]);
        assert_eq!(g_parts(&hits), expected);
        for hit in &hits {
            let p = witness_to_path(&b, &hit.witness).unwrap();
            assert_eq!(hit.length, 2 * p.len() + 1);
        }

        let far = b
            .member_bounded(&b.ambient_target(&zi(4)).unwrap(), &SearchConfig::new(9))
            .unwrap();
        assert!(!far.found());
    }

    #[test]
    fn mon_to_rat_two_separators_is_malformed() {
        let b = mon_to_rat(&loop_automaton(), MonToRatOptions::default()).unwrap();
        let w = GeneratorWord::positive([0, 1, 1, 3]);
        assert!(matches!(
            witness_to_path(&b, &w),
            Err(Error::MalformedWitness(_))
        ));
        let wrong = GeneratorWord::positive([0, 0, 1, 2, 2]);
        assert!(matches!(
            witness_to_path(&b, &wrong),
            Err(Error::MalformedWitness(_))
        ));
    }

    #[test]
    fn mon_to_rat_cyclic_shift_variant() {
        let opts = MonToRatOptions {
            pad_pow2: false,
            xsy: XsyChoice::CyclicShift(3),
        };
        let b = mon_to_rat(&loop_automaton(), opts).unwrap();
        let p = PathWitness(vec![0, 0, 1]);
        let w = path_to_witness(&b, &p).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(witness_to_path(&b, &w).unwrap(), p);
    }

    #[test]
    fn tighter_loop() {
        let a = signed_permutation_group(2).unwrap();
        let v = find_trivial_stabilizer_vector(&a);
        let b = tighter_aut(&loop_automaton(), &a, &v, XsyChoice::Rotation).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(
            b.generators
                .iter()
                .map(|g| g.origin.tag())
                .collect::<Vec<_>>(),
            ["T-edge(0,0)", "T-edge(0,1)", "cInvSep", "vInvLetter"]
        );
        let h = build_prop3_group();
        assert!(b.elements().iter().all(|e| e
            != &E::Product(vec![
                zi(0),
                b.h_spec().factors().unwrap()[0].identity(),
                h.y.clone()
            ])));

        let p = PathWitness(vec![0, 0, 1]);
        let w = path_to_witness(&b, &p).unwrap();
        assert_eq!(w, GeneratorWord::positive([0, 0, 1, 2, 3, 3, 3]));
        let value = b.ambient.evaluate_word(&b.elements(), &w).unwrap();
        assert_eq!(value, b.ambient_target(&zi(2)).unwrap());
        assert_eq!(witness_to_path(&b, &w).unwrap(), p);
    }

    #[test]
    fn tighter_state_images() {
        let a = signed_permutation_group(2).unwrap();
        let order = state_image_order(&a);
        assert_eq!(order[0], a.identity());
        let c = order[1];
        let smallest = (0..a.order())
            .filter(|&i| i != a.identity())
            .min_by_key(|&i| a.matrix(i).key_bytes())
            .unwrap();
        assert_eq!(c, smallest);
    }

    #[test]
    fn tighter_too_many_states() {
        let a = signed_permutation_group(2).unwrap();
        let v = find_trivial_stabilizer_vector(&a);
        let big = Automaton::new(z(), 8, 0, [7], vec![]).unwrap();
        let err = tighter_aut(&big, &a, &v, XsyChoice::Rotation).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(ref m) if m.contains("too many states")));
        let fits = Automaton::new(z(), 7, 0, [6], vec![]).unwrap();
        assert!(tighter_aut(&fits, &a, &v, XsyChoice::Rotation).is_ok());
    }

    #[test]
    fn tighter_rejects_stabilized_vector() {
        let a = signed_permutation_group(2).unwrap();
        let bad = TrivialStabVector {
            v: vec![1, 1],
            orbit_size: 8,
        };
        assert!(tighter_aut(&loop_automaton(), &a, &bad, XsyChoice::Rotation).is_err());
    }

    #[test]
    fn empty_path_round_trip() {
        // initial state accepting, no edges: the only path is the closing edge
        let aut = Automaton::new(z(), 1, 0, [0], vec![]).unwrap();
        for b in [
            mon_to_rat(&aut, MonToRatOptions::default()).unwrap(),
            tighter_aut(
                &aut,
                &signed_permutation_group(2).unwrap(),
                &TrivialStabVector {
                    v: vec![1, 2],
                    orbit_size: 8,
                },
                XsyChoice::Rotation,
            )
            .unwrap(),
        ] {
            let p = PathWitness(vec![0]);
            let w = path_to_witness(&b, &p).unwrap();
            assert_eq!(w.len(), 3);
            let value = b.ambient.evaluate_word(&b.elements(), &w).unwrap();
            assert_eq!(value, b.ambient_target(&zi(0)).unwrap());
            assert_eq!(witness_to_path(&b, &w).unwrap(), p);
        }
    }

    #[test]
    fn invalid_path_is_rejected() {
        let b = mon_to_rat(&loop_automaton(), MonToRatOptions::default()).unwrap();
        assert!(path_to_witness(&b, &PathWitness(vec![0])).is_err());
        assert!(path_to_witness(&b, &PathWitness(vec![7])).is_err());
    }

    #[test]
    fn bundle_json_round_trip() {
        let a = signed_permutation_group(2).unwrap();
        let v = find_trivial_stabilizer_vector(&a);
        let aut = loop_automaton();
        let bundles = vec![
            reduce_pair(&z(), &[zi(2)], &[zi(3)], XsyChoice::Rotation).unwrap(),
            pair_to_rat(&aut, true).unwrap().bundle,
            mon_to_rat(&aut, MonToRatOptions::default()).unwrap(),
            tighter_aut(&aut, &a, &v, XsyChoice::CyclicShift(4)).unwrap(),
        ];
        for b in bundles {
            let text = serde_json::to_string(&b.to_json()).unwrap();
            let back = ReductionBundle::from_json_str(&text).unwrap();
            assert_eq!(back, b, "{}", b.variant);
        }
    }

    #[test]
    fn bundle_json_rejects_bad_edge_tags() {
        let b = mon_to_rat(&loop_automaton(), MonToRatOptions::default()).unwrap();
        let mut v = b.to_json();
        v["generators"][2]["origin"] = serde_json::json!("T-edge(1,1)");
        let err = ReductionBundle::from_json(&v).unwrap_err();
        assert!(matches!(err, Error::Schema { .. }), "{err}");
        let mut v = b.to_json();
        v["generators"][0]["origin"] = serde_json::json!("bogus");
        assert!(ReductionBundle::from_json(&v).is_err());
    }

    #[test]
    fn source_hash_is_stable() {
        let a = mon_to_rat(&loop_automaton(), MonToRatOptions::default()).unwrap();
        let b = mon_to_rat(&loop_automaton(), MonToRatOptions::default()).unwrap();
        assert_eq!(a.source_hash, b.source_hash);
        assert_eq!(a.source_hash.as_ref().unwrap().len(), 64);
    }
}
