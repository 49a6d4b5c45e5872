//! Seeded random instances for the invariant suites.

use std::sync::Arc;

use prodmeasure_core::banach::CoordinateRectangle;
use prodmeasure_core::factor::{FactorSequence, FactorSpace, GeneratorSet};
use prodmeasure_core::lp::AmbientSpace;
use prodmeasure_core::numeric::{int, rat};
use prodmeasure_core::product::{Family, SequenceRule};
use prodmeasure_core::rectangle::{refine, Rectangle, TailSpec};
use prodmeasure_core::simple::CylinderSimpleFunction;
use prodmeasure_core::{Rational, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Gen = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn seeded(seed: u64) -> Gen {
    ChaCha8Rng::seed_from_u64(seed)
}

const DENOMINATORS: [i64; 5] = [1, 2, 3, 4, 6];

/// A rational `n/d` with `d` from a small set and `|n/d| <= bound`.
pub fn rational(g: &mut Gen, bound: i64) -> Rational {
    let d = *DENOMINATORS.choose(g).unwrap();
    rat(g.gen_range(-bound * d..=bound * d), d)
}

pub fn positive_rational(g: &mut Gen, bound: i64) -> Rational {
    let d = *DENOMINATORS.choose(g).unwrap();
    rat(g.gen_range(1..=bound * d), d)
}

/// `[a, a + len)` with `|a| <= 3` and `0 < len <= 3`.
pub fn interval(g: &mut Gen) -> (Rational, Rational) {
    let a = rational(g, 3);
    let len = positive_rational(g, 3);
    let b = &a + len;
    (a, b)
}

pub fn interval_set(g: &mut Gen) -> GeneratorSet {
    let (a, b) = interval(g);
    GeneratorSet::interval(a, b)
}

pub fn line_factors() -> Arc<FactorSequence> {
    Arc::new(FactorSequence::uniform(FactorSpace::Line))
}

/// A finite-volume tail: a shifted unit interval, or a general tail with
/// lengths `1 - r^n`.
pub fn finite_tail(g: &mut Gen) -> TailSpec {
    if g.gen_bool(0.75) {
        let c = rat(g.gen_range(-4..=4), 2);
        TailSpec::Unit(GeneratorSet::unit_from(&c))
    } else {
        let ratio = rat(1, g.gen_range(2..=4));
        let fam = Family::OneMinusGeometric { ratio };
        let cert = fam.default_certificate();
        TailSpec::General {
            start: rat(g.gen_range(-2..=2), 1),
            lengths: SequenceRule::ClosedForm { family: fam, certificate: cert, offset: 0 },
        }
    }
}

/// A bounded rectangle on line factors with head length in `1..=max_head`.
pub fn rectangle_with_tail(g: &mut Gen, max_head: usize, tail: TailSpec) -> Result<Rectangle> {
    let len = g.gen_range(1..=max_head);
    let head = (0..len).map(|_| interval_set(g)).collect();
    Rectangle::new(line_factors(), head, tail)
}

pub fn rectangle(g: &mut Gen, max_head: usize) -> Result<Rectangle> {
    let tail = finite_tail(g);
    rectangle_with_tail(g, max_head, tail)
}

fn bounds(s: &GeneratorSet) -> (Rational, Rational) {
    match s {
        GeneratorSet::Intervals(v) if v.len() == 1 => {
            (v[0].lo.finite().unwrap().clone(), v[0].hi.finite().unwrap().clone())
        }
        _ => panic!("generated head sets are single bounded intervals"),
    }
}

/// Splits head coordinate intervals into `2^k` congruent cells, distributing
/// the `k` halvings over the head coordinates.
pub fn dyadic_partition(g: &mut Gen, r: &Rectangle, k: usize) -> Result<Vec<Rectangle>> {
    let len = r.head_len();
    let mut splits = vec![0u32; len];
    for _ in 0..k {
        splits[g.gen_range(0..len)] += 1;
    }
    let mut cells: Vec<Vec<GeneratorSet>> = vec![Vec::new()];
    for (i, &s) in splits.iter().enumerate() {
        let (a, b) = bounds(&r.head()[i]);
        let pieces = 1i64 << s;
        let step = (&b - &a) / int(pieces);
        let parts: Vec<GeneratorSet> = (0..pieces)
            .map(|j| GeneratorSet::interval(&a + &step * int(j), &a + &step * int(j + 1)))
            .collect();
        cells = cells
            .into_iter()
            .flat_map(|c| {
                parts.iter().map(move |p| {
                    let mut c = c.clone();
                    c.push(p.clone());
                    c
                })
            })
            .collect();
    }
    cells.into_iter().map(|c| r.with_head(c)).collect()
}

/// Disjoint rectangles inside `outer`: a dyadic partition with some cells
/// dropped and some shrunk.
pub fn packing(g: &mut Gen, outer: &Rectangle) -> Result<Vec<Rectangle>> {
    let k = g.gen_range(1..=4);
    let mut out = Vec::new();
    for cell in dyadic_partition(g, outer, k)? {
        if g.gen_bool(0.25) {
            continue;
        }
        if g.gen_bool(0.5) {
            let mut head = cell.head().to_vec();
            let i = g.gen_range(0..head.len());
            let (a, b) = bounds(&head[i]);
            let keep = rat(g.gen_range(1..=3), 4);
            head[i] = GeneratorSet::interval(a.clone(), &a + (&b - &a) * keep);
            out.push(cell.with_head(head)?);
        } else {
            out.push(cell);
        }
    }
    Ok(out)
}

/// Overlapping rectangles covering `target`: dyadic cells with randomly
/// enlarged sides, plus a few unrelated rectangles with the same tail.
pub fn cover(g: &mut Gen, target: &Rectangle) -> Result<Vec<Rectangle>> {
    let k = g.gen_range(1..=3);
    let mut out = Vec::new();
    for cell in dyadic_partition(g, target, k)? {
        let head = cell
            .head()
            .iter()
            .map(|s| {
                let (a, b) = bounds(s);
                let grow_lo = rat(g.gen_range(0..=2), 4);
                let grow_hi = rat(g.gen_range(0..=2), 4);
                GeneratorSet::interval(a - grow_lo, b + grow_hi)
            })
            .collect();
        out.push(cell.with_head(head)?);
    }
    for _ in 0..g.gen_range(0..=2) {
        out.push(rectangle_with_tail(g, target.head_len(), target.tail().clone())?);
    }
    out.shuffle(g);
    Ok(out)
}

/// A disjoint family from the refinement of random rectangles sharing a tail.
pub fn algebra_set(g: &mut Gen) -> Result<Vec<Rectangle>> {
    let tail = finite_tail(g);
    let count = g.gen_range(1..=3);
    let rects: Vec<Rectangle> = (0..count).map(|_| rectangle_with_tail(g, 3, tail.clone())).collect::<Result<_>>()?;
    let atoms = refine(&rects)?.atoms;
    Ok(atoms.into_iter().filter(|_| g.gen_bool(0.7)).collect())
}

/// A cylinder with up to four constrained coordinates, some half-bounded.
pub fn cylinder(g: &mut Gen) -> Result<Rectangle> {
    let len = g.gen_range(1..=4);
    let head = (0..len)
        .map(|_| match g.gen_range(0..5) {
            0 => GeneratorSet::Full,
            1 => {
                let a = rational(g, 3);
                GeneratorSet::Intervals(vec![prodmeasure_core::factor::Interval {
                    lo: prodmeasure_core::factor::Bound::Finite(a),
                    hi: prodmeasure_core::factor::Bound::PosInf,
                }])
            }
            _ => interval_set(g),
        })
        .collect();
    Rectangle::new(line_factors(), head, TailSpec::Full)
}

/// A cylinder simple function on `ambient` with level `<= 4` and at most
/// eight cells, each cell a product of subintervals of the ambient sides.
pub fn simple_function(g: &mut Gen, ambient: &AmbientSpace) -> Result<CylinderSimpleFunction> {
    let level = g.gen_range(0..=4);
    let count = g.gen_range(0..=8);
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let coeff = rational(g, 4);
        let cell = (1..=level).map(|i| sub_interval(g, &ambient.rect().set_at(i))).collect();
        terms.push((coeff, cell));
    }
    CylinderSimpleFunction::new(level, terms)
}

fn sub_interval(g: &mut Gen, side: &GeneratorSet) -> GeneratorSet {
    let (a, b) = bounds(side);
    let mut cuts = [g.gen_range(0..=8), g.gen_range(0..=8)];
    cuts.sort();
    if cuts[0] == cuts[1] {
        cuts[1] = (cuts[0] + 1).min(8);
        cuts[0] = cuts[1] - 1;
    }
    let w = (&b - &a) / int(8);
    GeneratorSet::interval(&a + &w * int(cuts[0]), &a + &w * int(cuts[1]))
}

/// An ambient rectangle on line factors: up to three random sides and the
/// unit tail.
pub fn ambient(g: &mut Gen) -> Result<AmbientSpace> {
    let len = g.gen_range(0..=3);
    let head = (0..len)
        .map(|_| {
            let a = rational(g, 2);
            let b = &a + positive_rational(g, 2);
            GeneratorSet::interval(a, b)
        })
        .collect();
    AmbientSpace::new(Rectangle::new(line_factors(), head, TailSpec::Unit(GeneratorSet::unit_from(&int(0))))?)
}

/// A function on the sequence space with level `<= 3`, cells bounded inside
/// `[-2, 3)` with endpoints on a quarter grid, tail offset `offset`.
pub fn rn_cells(g: &mut Gen) -> (usize, Vec<(Rational, Vec<GeneratorSet>)>) {
    let level = g.gen_range(0..=3);
    let count = g.gen_range(0..=5);
    let terms = (0..count)
        .map(|_| {
            let coeff = rational(g, 3);
            let cell = (0..level)
                .map(|_| {
                    let a = g.gen_range(-8..12);
                    let b = g.gen_range(a + 1..=(a + 6).min(12));
                    GeneratorSet::interval(rat(a, 4), rat(b, 4))
                })
                .collect();
            (coeff, cell)
        })
        .collect();
    (level, terms)
}

/// A bounded coordinate rectangle with up to three head sides.
pub fn coordinate_rectangle(g: &mut Gen) -> Result<CoordinateRectangle> {
    let len = g.gen_range(0..=3);
    let head = (0..len).map(|_| interval_set(g)).collect();
    CoordinateRectangle::new(head, rat(-1, 2))
}

/// A finitely supported shift vector of length `<= 4`.
pub fn shift_vector(g: &mut Gen) -> Vec<Rational> {
    (0..g.gen_range(0..=4)).map(|_| rational(g, 2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let (mut a, mut b) = (seeded(5), seeded(5));
        for _ in 0..20 {
            assert_eq!(rational(&mut a, 10), rational(&mut b, 10));
        }
    }

    #[test]
    fn dyadic_partition_has_two_to_the_k_cells() {
        let mut g = seeded(1);
        let r = rectangle(&mut g, 3).unwrap();
        for k in 0..5 {
            assert_eq!(dyadic_partition(&mut g, &r, k).unwrap().len(), 1 << k);
        }
    }
}
