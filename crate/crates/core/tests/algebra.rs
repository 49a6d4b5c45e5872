use std::sync::Arc;

use proptest::prelude::*;

use prodmeasure_core::factor::{FactorSequence, FactorSpace, GeneratorSet};
use prodmeasure_core::measure::{premeasure, translate_rect, Mass};
use prodmeasure_core::numeric::rat;
use prodmeasure_core::product::{default_precision, ProductValue, SequenceRule};
use prodmeasure_core::rectangle::{refine, RectUnion, Rectangle, Shift, TailSpec};
use prodmeasure_core::Rational;

fn factors() -> Arc<FactorSequence> {
    Arc::new(FactorSequence::uniform(FactorSpace::Line))
}

fn side() -> impl Strategy<Value = GeneratorSet> {
    (-8i64..8, 1i64..8, 1i64..4).prop_map(|(a, len, d)| GeneratorSet::interval(rat(a, d), rat(a + len, d)))
}

fn rect() -> impl Strategy<Value = Rectangle> {
    proptest::collection::vec(side(), 0..4).prop_map(|head| {
        Rectangle::new(factors(), head, TailSpec::Unit(GeneratorSet::unit_from(&rat(0, 1)))).unwrap()
    })
}

/// Product of side lengths, computed without the library's volume code.
fn side_product(r: &Rectangle) -> Rational {
    r.head()
        .iter()
        .map(|s| match s {
            GeneratorSet::Intervals(ivs) => ivs
                .iter()
                .map(|iv| iv.hi.finite().unwrap() - iv.lo.finite().unwrap())
                .fold(rat(0, 1), |a, b| a + b),
            _ => unreachable!(),
        })
        .fold(rat(1, 1), |a, b| a * b)
}

fn mass(rs: &[Rectangle]) -> Mass {
    Mass::sum(rs, &default_precision()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn volume_is_side_product(r in rect()) {
        prop_assert_eq!(r.vol().unwrap(), ProductValue::exact(side_product(&r)));
    }

    #[test]
    fn intersection_is_commutative_and_smaller(r in rect(), s in rect()) {
        let a = r.intersect(&s).unwrap();
        let b = s.intersect(&r).unwrap();
        prop_assert!(mass(&[a.clone()]).same_as(&mass(&[b])));
        prop_assert!(a.is_subset(&r).unwrap());
        prop_assert!(a.is_subset(&s).unwrap());
        prop_assert_eq!(a.vol().unwrap().certainly_le(&r.vol().unwrap()), Some(true));
    }

    #[test]
    fn difference_splits_volume(r in rect(), s in rect()) {
        let pieces = r.difference(&s).unwrap();
        for (i, p) in pieces.iter().enumerate() {
            prop_assert!(p.is_disjoint(&s).unwrap());
            prop_assert!(p.is_subset(&r).unwrap());
            for q in &pieces[i + 1..] {
                prop_assert!(p.is_disjoint(q).unwrap());
            }
        }
        let mut parts = pieces;
        parts.push(r.intersect(&s).unwrap());
        prop_assert!(mass(&parts).same_as(&mass(&[r])));
    }

    #[test]
    fn refinement_reassembles_each_member(rs in proptest::collection::vec(rect(), 1..4)) {
        let refined = refine(&rs).unwrap();
        for (k, r) in rs.iter().enumerate() {
            let atoms: Vec<Rectangle> = refined.atoms_of(k).into_iter().map(|i| refined.atoms[i].clone()).collect();
            let u = RectUnion::new(atoms).unwrap();
            prop_assert_eq!(premeasure(&u, &default_precision()).unwrap(), ProductValue::exact(side_product(r)));
        }
    }

    #[test]
    fn translation_preserves_volume(r in rect(), head in proptest::collection::vec(-5i64..5, 0..4), t in -3i64..3) {
        let shift = Shift { head: head.into_iter().map(|x| rat(x, 3)).collect(), tail: rat(t, 1) };
        let moved = translate_rect(&r, &shift).unwrap();
        prop_assert_eq!(moved.vol().unwrap(), r.vol().unwrap());
    }

    #[test]
    fn eventually_one_products_are_exact(prefix in proptest::collection::vec((1i64..9, 1i64..9), 0..6)) {
        let terms: Vec<Rational> = prefix.iter().map(|&(n, d)| rat(n, d)).collect();
        let want = terms.iter().fold(rat(1, 1), |a, b| a * b);
        let rule = SequenceRule::eventually(terms, rat(1, 1)).unwrap();
        let prec = default_precision();
        prop_assert_eq!(rule.classify(&prec).unwrap(), ProductValue::exact(want.clone()));
        prop_assert_eq!(rule.plus_product(&prec).unwrap().value, ProductValue::exact(want));
    }

    #[test]
    fn periodic_terms_below_one_vanish(pattern in proptest::collection::vec((1i64..5, 5i64..9), 1..4)) {
        let rule = SequenceRule::periodic(pattern.into_iter().map(|(n, d)| rat(n, d)).collect()).unwrap();
        prop_assert_eq!(rule.plus_product(&default_precision()).unwrap().value, ProductValue::Zero);
    }
}
