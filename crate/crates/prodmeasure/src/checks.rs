//! Invariant suites run by `check all`: seeded, exact, and deterministic.

use prodmeasure_core::banach::{CoordinateRectangle, MBasisSpec, XSimpleFunction};
use prodmeasure_core::factor::GeneratorSet;
use prodmeasure_core::interval::Real;
use prodmeasure_core::lp::{AmbientSpace, LimSequence};
use prodmeasure_core::measure::{
    binary_family, packing_check, premeasure, split_check, subadditivity_bound, CoverPrefix, Mass,
};
use prodmeasure_core::numeric::{int, pow, rat};
use prodmeasure_core::product::{default_precision, ProductValue};
use prodmeasure_core::rectangle::{RectUnion, Rectangle, TailSpec};
use prodmeasure_core::rn::{CubeIndex, RnFunction};
use prodmeasure_core::simple::CylinderSimpleFunction;
use prodmeasure_core::{Rational, Result};
use rand::Rng;
use serde_json::{json, Value};

use crate::gen::{self, Gen};

/// Failures beyond this many are counted but not described.
const MAX_REPORTED: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    pub failures: Vec<String>,
    pub failed: usize,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, instances: 0, failures: Vec::new(), failed: 0 }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.instances > 0
    }

    /// Records one instance; `Ok(None)` passes, `Ok(Some(why))` fails.
    fn record(&mut self, outcome: Result<Option<String>>) {
        self.instances += 1;
        let why = match outcome {
            Ok(None) => return,
            Ok(Some(why)) => why,
            Err(e) => format!("error: {e}"),
        };
        self.failed += 1;
        if self.failures.len() < MAX_REPORTED {
            self.failures.push(format!("instance {}: {why}", self.instances));
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "instances": self.instances,
            "failed": self.failed,
            "failures": self.failures,
            "pass": self.passed(),
        })
    }
}

fn fail_unless(ok: bool, why: impl FnOnce() -> String) -> Option<String> {
    if ok {
        None
    } else {
        Some(why())
    }
}

pub type Suite = fn(&mut Gen) -> SuiteReport;

/// Suites in report order.
pub const SUITES: [(&str, Suite); 10] = [
    ("additivity", additivity),
    ("packing", packing),
    ("subadditivity", subadditivity),
    ("caratheodory", caratheodory),
    ("singleton", singleton),
    ("binary-family", non_sigma_finite),
    ("lp-isometry", lp_isometry),
    ("jessen", jessen),
    ("cube-decomposition", cube_decomposition),
    ("banach", banach),
];

/// Runs every suite, each from its own stream derived from `seed`.
pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    SUITES.iter().enumerate().map(|(k, (_, suite))| suite(&mut gen::seeded(seed.wrapping_add(k as u64)))).collect()
}

pub fn run_named(name: &str, seed: u64) -> Option<SuiteReport> {
    let k = SUITES.iter().position(|(n, _)| *n == name)?;
    Some(SUITES[k].1(&mut gen::seeded(seed.wrapping_add(k as u64))))
}

pub fn report(seed: u64, suites: &[SuiteReport]) -> Value {
    json!({
        "command": "check all",
        "seed": seed,
        "suites": suites.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
        "all_pass": suites.iter().all(SuiteReport::passed),
    })
}

/// Dyadic subdivisions of random rectangles into `2^k` cells, `k <= 12`.
pub fn additivity(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("additivity");
    let prec = default_precision();
    for i in 0..50 {
        // Every k in 1..=12 appears; the rest stay small to bound runtime.
        let k = if i < 12 { i + 1 } else { g.gen_range(1..=6) };
        rep.record((|| {
            let r = gen::rectangle(g, 4)?;
            let cells = gen::dyadic_partition(g, &r, k)?;
            let count = cells.len();
            let u = RectUnion::new(cells)?;
            let whole = Mass::of_rect(&r, &prec)?;
            let parts = Mass::sum(u.members(), &prec)?;
            let (pm, vol) = (premeasure(&u, &prec)?, r.vol_with(&prec)?);
            let exact_ok = !matches!(vol, ProductValue::Exact(_) | ProductValue::Zero) || pm == vol;
            Ok(fail_unless(count == 1 << k && u.len() == count && parts.same_as(&whole) && exact_ok, || {
                format!("{r} split into {count} cells: premeasure {pm}, vol {vol}")
            }))
        })());
    }
    rep
}

pub fn packing(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("packing");
    let prec = default_precision();
    for _ in 0..50 {
        rep.record((|| {
            let outer = gen::rectangle(g, 3)?;
            let inner = gen::packing(g, &outer)?;
            let c = packing_check(&inner, &outer, &prec)?;
            Ok(fail_unless(c.holds == Some(true), || format!("sum {} vs outer {}", c.sum, c.outer)))
        })());
    }
    rep
}

pub fn subadditivity(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("subadditivity");
    let prec = default_precision();
    for _ in 0..50 {
        rep.record((|| {
            let target = gen::rectangle(g, 3)?;
            let cover = gen::cover(g, &target)?;
            let cp = CoverPrefix { cover: cover.clone(), target: RectUnion::new(vec![target.clone()])? };
            let b = subadditivity_bound(&cp, &prec)?;
            let le = Mass::of_rect(&target, &prec)?.certainly_le(&Mass::sum(&cover, &prec)?, &prec)?;
            Ok(fail_unless(le == Some(true), || format!("vol {} vs cover sum {}", b.exact, b.bound)))
        })());
    }
    rep
}

pub fn caratheodory(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("caratheodory");
    let prec = default_precision();
    for _ in 0..100 {
        rep.record((|| {
            let b = RectUnion::new(gen::algebra_set(g)?)?;
            let c = gen::cylinder(g)?;
            let s = split_check(&b, &c, &prec)?;
            Ok(fail_unless(s.equal, || format!("{} != {} + {} for cylinder {c}", s.lhs, s.rhs_in, s.rhs_out)))
        })());
    }
    rep
}

/// Fixed rectangles covering every tail kind, plus random ones.
pub fn rectangle_corpus(g: &mut Gen) -> Result<Vec<Rectangle>> {
    use prodmeasure_core::factor::{FactorSequence, FactorSpace};
    use prodmeasure_core::product::{Family, SequenceRule};
    use std::sync::Arc;

    let line = gen::line_factors();
    let unit = Arc::new(FactorSequence::uniform(FactorSpace::UnitInterval));
    let iv = |a: Rational, b: Rational| GeneratorSet::interval(a, b);
    let unit_tail = TailSpec::Unit(GeneratorSet::unit_from(&int(0)));
    let half_prod = SequenceRule::ClosedForm {
        family: Family::OneMinusGeometric { ratio: rat(1, 2) },
        certificate: Family::OneMinusGeometric { ratio: rat(1, 2) }.default_certificate(),
        offset: 0,
    };
    let mut corpus = vec![
        Rectangle::new(line.clone(), vec![iv(int(0), rat(1, 2)), iv(int(0), rat(1, 3))], unit_tail.clone())?,
        Rectangle::new(unit.clone(), vec![], TailSpec::Full)?,
        Rectangle::new(unit.clone(), vec![iv(int(0), rat(1, 4))], TailSpec::Full)?,
        Rectangle::new(
            Arc::new(FactorSequence { prefix: vec![FactorSpace::Line], tail: FactorSpace::UnitInterval }),
            vec![iv(int(0), int(2))],
            TailSpec::Full,
        )?,
        Rectangle::new(line.clone(), vec![iv(int(0), int(3))], TailSpec::Full)?,
        Rectangle::new(line.clone(), vec![], TailSpec::General { start: int(0), lengths: half_prod.clone() })?,
        Rectangle::new(line.clone(), vec![iv(int(1), int(4))], TailSpec::General { start: int(1), lengths: half_prod })?,
        Rectangle::new(line, vec![GeneratorSet::Intervals(vec![])], unit_tail)?,
    ];
    for _ in 0..20 {
        corpus.push(gen::rectangle(g, 4)?);
    }
    Ok(corpus)
}

pub fn singleton(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("singleton");
    let prec = default_precision();
    let corpus = match rectangle_corpus(g) {
        Ok(c) => c,
        Err(e) => {
            rep.record(Err(e));
            return rep;
        }
    };
    for r in corpus {
        rep.record((|| {
            let (pm, vol) = (premeasure(&RectUnion::new(vec![r.clone()])?, &prec)?, r.vol_with(&prec)?);
            Ok(fail_unless(pm == vol, || format!("{r}: premeasure {pm}, vol {vol}")))
        })());
    }
    rep
}

pub fn non_sigma_finite(_: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("binary-family");
    let prec = default_precision();
    for k in 1..=10 {
        rep.record((|| {
            let family = binary_family(gen::line_factors(), k)?;
            let count = family.len();
            let unit_each = family.iter().all(|r| r.vol_with(&prec) == Ok(ProductValue::one()));
            let u = RectUnion::new(family)?;
            let total = premeasure(&u, &prec)?;
            let want = ProductValue::exact(pow(&int(2), k as u64));
            Ok(fail_unless(count == 1 << k && u.len() == count && unit_each && total == want, || {
                format!("k = {k}: {count} members, union {total}")
            }))
        })());
    }
    rep
}

pub fn lp_instance(g: &mut Gen) -> Result<(AmbientSpace, CylinderSimpleFunction)> {
    let a = gen::ambient(g)?;
    let f = gen::simple_function(g, &a)?;
    Ok((a, f))
}

pub fn lp_isometry(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("lp-isometry");
    for _ in 0..50 {
        rep.record((|| {
            let (a, f) = lp_instance(g)?;
            let s = a.frak_s(&f)?;
            for p in [int(1), int(2)] {
                let (nf, ns) = (a.lp_norm(&f, &p)?, a.lim_norm(&s, &p)?);
                if nf != ns {
                    return Ok(Some(format!("p = {p}: |f| = {}, |Sf| = {}", nf.norm, ns.norm)));
                }
            }
            if a.frak_t(&s)? != f.canonical_sum(&a)? {
                return Ok(Some(format!("T(S f) differs from f = {f}")));
            }
            let h = gen::simple_function(g, &a)?;
            let t = LimSequence { level: h.level + g.gen_range(0..=2), g: h };
            Ok(fail_unless(a.lim_equivalent(&a.frak_s(&a.frak_t(&t)?)?, &t)?, || format!("S(T s) differs from s at level {}", t.level)))
        })());
    }
    rep
}

/// Once `n` passes both the level of `f` and the constrained ambient
/// coordinates, tail integrals reproduce `f` and head integrals are the
/// constant integral.
pub fn jessen(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("jessen");
    for _ in 0..50 {
        rep.record((|| {
            let (a, f) = lp_instance(g)?;
            let canon = f.canonical_sum(&a)?;
            let total = CylinderSimpleFunction::constant(a.integrate(&f)?);
            let start = f.level.max(a.head_len());
            for n in start + 1..=start + 3 {
                if !a.tail_integral(&f, n)?.equivalent(&canon, &a)? {
                    return Ok(Some(format!("tail integral at n = {n} differs from f = {f}")));
                }
            }
            for n in start..=start + 2 {
                if !a.head_integral(&f, n)?.equivalent(&total, &a)? {
                    return Ok(Some(format!("head integral at n = {n} is not the constant {total}")));
                }
            }
            Ok(None)
        })());
    }
    rep
}

pub fn rn_instance(g: &mut Gen) -> Result<RnFunction> {
    let offset = [int(0), rat(1, 2), rat(-1, 3), rat(1, 4)][g.gen_range(0..4)].clone();
    let (level, terms) = gen::rn_cells(g);
    RnFunction::new(offset, CylinderSimpleFunction::new(level, terms)?)
}

pub fn cube_decomposition(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("cube-decomposition");
    rep.record((|| {
        let f = RnFunction::new(int(0), CylinderSimpleFunction::new(1, vec![(int(1), vec![GeneratorSet::interval(rat(1, 2), rat(3, 2))])])?)?;
        let b = f.integral_by_cubes(&int(1))?;
        let want = vec![(CubeIndex::origin(), Real::Exact(rat(1, 2))), (CubeIndex::from_dense(&[1]), Real::Exact(rat(1, 2)))];
        Ok(fail_unless(b.pieces == want && b.total == Real::Exact(int(1)), || "cell-split pieces differ".into()))
    })());
    for _ in 0..50 {
        rep.record((|| {
            let f = rn_instance(g)?;
            let e = f.frak_p()?;
            for p in [int(1), int(2)] {
                let b = f.integral_by_cubes(&p)?;
                if b.total != b.direct {
                    return Ok(Some(format!("p = {p}: cube total {} vs direct {} for {f}", b.total, b.direct)));
                }
                if e.oplus_norm(&p)? != f.lp_norm(&p)? {
                    return Ok(Some(format!("p = {p}: direct-sum norm differs for {f}")));
                }
            }
            if e.frak_p_inv()? != f {
                return Ok(Some(format!("P^-1 P f differs from {f}")));
            }
            Ok(fail_unless(e.frak_p_inv()?.frak_p()? == e, || format!("P P^-1 differs for {f}")))
        })());
    }
    rep
}

pub fn x_function(g: &mut Gen, basis: &MBasisSpec) -> Result<XSimpleFunction> {
    let terms = (0..g.gen_range(1..=4))
        .map(|_| Ok((gen::rational(g, 3), gen::coordinate_rectangle(g)?)))
        .collect::<Result<Vec<_>>>()?;
    XSimpleFunction::new(basis.clone(), terms)
}

pub fn banach(g: &mut Gen) -> SuiteReport {
    let mut rep = SuiteReport::new("banach");
    rep.record(CoordinateRectangle::cube().mu_x().map(|m| fail_unless(m == int(1), || format!("mu_X(Q) = {m}"))));
    let basis = match MBasisSpec::geometric("l2", rat(1, 2)) {
        Ok(b) => b,
        Err(e) => {
            rep.record(Err(e));
            return rep;
        }
    };
    for _ in 0..50 {
        rep.record((|| {
            let b = gen::coordinate_rectangle(g)?;
            let v = gen::shift_vector(g);
            let (before, after) = (b.mu_x()?, b.translate(&basis, &v)?.mu_x()?);
            if before != after {
                return Ok(Some(format!("mu_X changed from {before} to {after} under translation")));
            }
            let f = x_function(g, &basis)?;
            let e = f.frak_e()?;
            for p in [int(1), int(2)] {
                if f.lp_norm(&p)? != e.lp_norm(&p)? {
                    return Ok(Some(format!("p = {p}: embedding changes the norm")));
                }
                let r = f.integrate_on_x(&p)?;
                if r.direct != r.by_cubes.total || r.direct != r.oplus {
                    return Ok(Some(format!("p = {p}: direct {}, cubes {}, oplus {}", r.direct, r.by_cubes.total, r.oplus)));
                }
            }
            Ok(None)
        })());
    }
    rep
}
