//! Serialized objects re-parse to structurally equal objects.

use std::sync::Arc;

use prodmeasure::codec;
use prodmeasure_core::banach::{CoordinateRectangle, MBasisSpec, XSimpleFunction};
use prodmeasure_core::factor::{Bound, FactorSequence, FactorSpace, GeneratorSet, Interval};
use prodmeasure_core::numeric::rat;
use prodmeasure_core::product::{Certificate, Family, SequenceRule};
use prodmeasure_core::rectangle::{Rectangle, Shift, TailSpec};
use prodmeasure_core::rn::{CubeIndex, DirectSumElement, RnFunction};
use prodmeasure_core::simple::CylinderSimpleFunction;
use prodmeasure_core::Rational;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn interval() -> impl Strategy<Value = Interval> {
    (rational(), positive(), 0u8..4).prop_map(|(a, len, kind)| match kind {
        0 => Interval { lo: Bound::NegInf, hi: Bound::Finite(a) },
        1 => Interval { lo: Bound::Finite(a), hi: Bound::PosInf },
        _ => Interval { lo: Bound::Finite(a.clone()), hi: Bound::Finite(a + len) },
    })
}

fn set() -> impl Strategy<Value = GeneratorSet> {
    prop_oneof![
        Just(GeneratorSet::Full),
        proptest::collection::vec(interval(), 0..3).prop_map(GeneratorSet::Intervals),
        proptest::collection::btree_set("[a-d]", 1..3).prop_map(GeneratorSet::Atoms),
    ]
}

fn bounded_set() -> impl Strategy<Value = GeneratorSet> {
    (rational(), positive()).prop_map(|(a, len)| GeneratorSet::interval(a.clone(), a + len))
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        positive().prop_map(|value| Family::Constant { value }),
        (rational(), positive()).prop_map(|(scale, r)| Family::GeometricLog { scale, ratio: r / rat(60, 1) }),
        rational().prop_map(|scale| Family::AlternatingHarmonicExp { scale }),
        (1i64..9).prop_map(|d| Family::OneMinusGeometric { ratio: rat(1, d + 1) }),
    ]
}

fn rule() -> impl Strategy<Value = SequenceRule> {
    prop_oneof![
        (proptest::collection::vec(positive(), 0..4), positive())
            .prop_map(|(prefix, tail)| SequenceRule::EventuallyConstant { prefix, tail }),
        proptest::collection::vec(positive(), 1..4).prop_map(|pattern| SequenceRule::Periodic { pattern }),
        (family(), 0usize..5, any::<bool>()).prop_map(|(family, offset, certified)| {
            let certificate = if certified { family.default_certificate() } else { None };
            SequenceRule::ClosedForm { family, certificate, offset }
        }),
    ]
}

proptest! {
    #[test]
    fn rationals(q in rational()) {
        prop_assert_eq!(codec::rational(&codec::rational_out(&q)).unwrap(), q);
    }

    #[test]
    fn sets(s in set()) {
        prop_assert_eq!(codec::set(&codec::set_out(&s)).unwrap(), s);
    }

    #[test]
    fn rules(r in rule()) {
        prop_assert_eq!(codec::rule(&codec::rule_out(&r)).unwrap(), r);
    }

    #[test]
    fn certificates(c in (positive(), positive())) {
        let rule = SequenceRule::ClosedForm {
            family: Family::GeometricLog { scale: c.0.clone(), ratio: rat(1, 3) },
            certificate: Some(Certificate::Geometric { coefficient: c.0 * rat(3, 2) + c.1, ratio: rat(1, 3) }),
            offset: 0,
        };
        prop_assert_eq!(codec::rule(&codec::rule_out(&rule)).unwrap(), rule);
    }

    #[test]
    fn rectangles(head in proptest::collection::vec(bounded_set(), 0..4), c in rational(), unit in any::<bool>()) {
        let factors = Arc::new(FactorSequence::uniform(FactorSpace::Line));
        let tail = if unit { TailSpec::Unit(GeneratorSet::unit_from(&c)) } else { TailSpec::Full };
        let r = Rectangle::new(factors.clone(), head, tail).unwrap();
        prop_assert_eq!(codec::rectangle(&codec::rectangle_out(&r), &factors).unwrap(), r);
    }

    #[test]
    fn shifts(head in proptest::collection::vec(rational(), 0..4), tail in rational()) {
        let s = Shift { head, tail };
        prop_assert_eq!(codec::shift(&codec::shift_out(&s)).unwrap(), s);
    }

    #[test]
    fn functions(
        level in 0usize..3,
        terms in proptest::collection::vec((rational(), proptest::collection::vec(bounded_set(), 3)), 0..4),
        offset in rational(),
    ) {
        let terms: Vec<_> = terms.into_iter().map(|(c, cell)| (c, cell[..level].to_vec())).collect();
        let f = CylinderSimpleFunction::new(level, terms).unwrap();
        prop_assert_eq!(codec::function(&codec::function_out(&f)).unwrap(), f.clone());
        let g = RnFunction::new(offset, f).unwrap();
        prop_assert_eq!(codec::rn_function(&codec::rn_function_out(&g)).unwrap(), g.clone());
        let e = g.frak_p().unwrap();
        prop_assert_eq!(codec::direct_sum(&codec::direct_sum_out(&e)).unwrap(), e);
    }

    #[test]
    fn cube_indices(entries in proptest::collection::btree_map(1usize..6, -4i64..4, 0..4)) {
        let a = CubeIndex::from_pairs(entries).unwrap();
        prop_assert_eq!(codec::cube_index(&codec::cube_index_out(&a)).unwrap(), a);
    }

    #[test]
    fn x_functions(
        d in 2i64..5,
        terms in proptest::collection::vec((rational(), proptest::collection::vec(bounded_set(), 0..3)), 1..3),
    ) {
        let basis = MBasisSpec::geometric("custom", rat(1, d)).unwrap();
        let terms = terms
            .into_iter()
            .map(|(c, head)| (c, CoordinateRectangle::new(head, rat(-1, 2)).unwrap()))
            .collect();
        let f = XSimpleFunction::new(basis, terms).unwrap();
        prop_assert_eq!(codec::x_function(&codec::x_function_out(&f)).unwrap(), f);
    }
}

#[test]
fn factor_sequences() {
    let fs = FactorSequence {
        prefix: vec![FactorSpace::Line, FactorSpace::discrete([("a", rat(1, 2)), ("b", rat(3, 1))]).unwrap()],
        tail: FactorSpace::UnitInterval,
    };
    assert_eq!(codec::factors(&codec::factors_out(&fs)).unwrap(), fs);
    let uniform = FactorSequence::uniform(FactorSpace::Line);
    assert_eq!(codec::factors(&codec::factors_out(&uniform)).unwrap(), uniform);
}

#[test]
fn empty_direct_sum() {
    let e = DirectSumElement::empty(rat(1, 2));
    assert_eq!(codec::direct_sum(&codec::direct_sum_out(&e)).unwrap(), e);
}
