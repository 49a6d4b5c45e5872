//! The product of Lebesgue measures on the real sequence space: cube
//! lattices, per-cube integrals and the isometry onto a direct sum of
//! `L_p([0,1)^N)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::factor::{Bound, FactorSequence, FactorSpace, GeneratorSet};
use crate::interval::{rational_power, Real};
use crate::lp::{AmbientSpace, LpNorm};
use crate::numeric::{int, Extended, Rational};
use crate::rectangle::{Rectangle, TailSpec};
use crate::simple::{cell_measure, CylinderSimpleFunction, Frame, SimpleTerm};

/// Largest number of cubes enumerated for one function.
pub const MAX_CUBES: usize = 1 << 16;

/// Real-line factors whose implicit tail set is `[offset, offset + 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnFrame {
    pub offset: Rational,
}

impl RnFrame {
    pub fn unit_set(&self) -> GeneratorSet {
        GeneratorSet::unit_from(&self.offset)
    }
}

impl Frame for RnFrame {
    fn factor(&self, _: usize) -> &FactorSpace {
        &FactorSpace::Line
    }

    fn implicit_set(&self, _: usize) -> GeneratorSet {
        self.unit_set()
    }

    fn ambient_set(&self, _: usize) -> GeneratorSet {
        GeneratorSet::Full
    }
}

/// Finitely supported integer sequence; entries that are zero are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeIndex(BTreeMap<usize, i64>);

impl CubeIndex {
    pub fn origin() -> Self {
        CubeIndex::default()
    }

    /// From `(coordinate, value)` pairs with 1-based coordinates.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, i64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, a) in pairs {
            if i == 0 {
                return Err(Error::precondition("cube coordinates are 1-based"));
            }
            if a != 0 {
                map.insert(i, a);
            }
        }
        Ok(CubeIndex(map))
    }

    /// From a dense prefix `a_1, a_2, ...`.
    pub fn from_dense(values: &[i64]) -> Self {
        CubeIndex(values.iter().enumerate().filter(|(_, a)| **a != 0).map(|(i, a)| (i + 1, *a)).collect())
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.0.iter().map(|(i, a)| (*i, *a))
    }

    /// Last coordinate with a nonzero entry, or 0.
    pub fn support_end(&self) -> usize {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    pub fn dense(&self, len: usize) -> Vec<i64> {
        (1..=len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for CubeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, (i, a)) in self.entries().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}:{a}")?;
        }
        f.write_str(")")
    }
}

/// A cylinder simple function on the sequence space, equal to its last
/// head value along `[offset, offset + 1)` in every later coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnFunction {
    frame: RnFrame,
    f: CylinderSimpleFunction,
}

/// Per-cube integrals of `|f|^p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeBreakdown {
    pub pieces: Vec<(CubeIndex, Real)>,
    pub total: Real,
    /// Integral computed without splitting into cubes.
    pub direct: Real,
}

fn bounds_of(s: &GeneratorSet) -> Result<Vec<(Rational, Rational)>> {
    FactorSpace::Line
        .as_intervals(s)?
        .into_iter()
        .map(|iv| match (iv.lo, iv.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Ok((a, b)),
            _ => Err(Error::precondition(format!("cell {s} is unbounded, so the function is not integrable"))),
        })
        .collect()
}

fn to_i64(q: &Rational) -> Result<i64> {
    q.to_integer().to_i64().ok_or_else(|| Error::unsupported("cube index out of range"))
}

fn check_p(p: &Rational) -> Result<()> {
    if *p < Rational::one() {
        Err(Error::precondition(format!("p = {p} must be at least 1")))
    } else {
        Ok(())
    }
}

fn cube_set(lattice: &Rational, a: i64) -> GeneratorSet {
    GeneratorSet::unit_from(&(lattice + int(a)))
}

/// `[0,1)^N` as an ambient space for direct-sum components.
pub fn unit_cube_ambient() -> AmbientSpace {
    let factors = Arc::new(FactorSequence::uniform(FactorSpace::Line));
    let rect = Rectangle::new(factors, Vec::new(), TailSpec::Unit(GeneratorSet::unit_from(&Rational::zero())))
        .expect("unit cube is a valid rectangle");
    AmbientSpace::new(rect).expect("unit cube has volume 1")
}

impl RnFunction {
    /// Validates that every cell is bounded; stores the canonical form.
    pub fn new(offset: Rational, f: CylinderSimpleFunction) -> Result<Self> {
        let frame = RnFrame { offset };
        let f = f.canonical_sum(&frame)?;
        for t in &f.terms {
            for s in &t.cell {
                bounds_of(s)?;
            }
        }
        Ok(RnFunction { frame, f })
    }

    pub fn zero() -> Self {
        RnFunction { frame: RnFrame { offset: Rational::zero() }, f: CylinderSimpleFunction::zero(0) }
    }

    pub fn offset(&self) -> &Rational {
        &self.frame.offset
    }

    pub fn frame(&self) -> &RnFrame {
        &self.frame
    }

    pub fn function(&self) -> &CylinderSimpleFunction {
        &self.f
    }

    /// `int |f|^p`.
    pub fn norm_pow(&self, p: &Rational) -> Result<Real> {
        check_p(p)?;
        let mut total = Real::zero();
        for t in &self.f.terms {
            let Extended::Finite(m) = cell_measure(&self.frame, &t.cell)? else {
                return Err(Error::precondition("unbounded cell"));
            };
            total = total.add(&rational_power(&t.coeff.abs(), p).mul(&Real::Exact(m)));
        }
        Ok(total)
    }

    pub fn integral(&self) -> Result<Rational> {
        let mut total = Rational::zero();
        for t in &self.f.terms {
            total += &t.coeff * cell_measure(&self.frame, &t.cell)?.finite().cloned().unwrap_or_default();
        }
        Ok(total)
    }

    pub fn lp_norm(&self, p: &Rational) -> Result<LpNorm> {
        let pth_power = self.norm_pow(p)?;
        Ok(LpNorm { p: p.clone(), norm: pth_power.root(p), pth_power })
    }

    /// Indices of the cubes `[offset + a_i, offset + a_i + 1)` meeting the support.
    pub fn cube_support(&self) -> Result<Vec<CubeIndex>> {
        self.support_on(&self.frame.offset)
    }

    fn support_on(&self, lattice: &Rational) -> Result<Vec<CubeIndex>> {
        let mut found: BTreeSet<CubeIndex> = BTreeSet::new();
        for t in &self.f.terms {
            let mut per_coord: Vec<Vec<i64>> = Vec::with_capacity(t.cell.len());
            for s in &t.cell {
                let mut options = BTreeSet::new();
                for (lo, hi) in bounds_of(s)? {
                    let first = to_i64(&(&lo - lattice).floor())?;
                    let last = to_i64(&(&hi - lattice).ceil())? - 1;
                    if (last - first) as usize >= MAX_CUBES {
                        return Err(Error::unsupported("cell meets too many cubes"));
                    }
                    options.extend(first..=last);
                }
                per_coord.push(options.into_iter().collect());
            }
            let count = per_coord.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
            if count.is_none_or(|c| c > MAX_CUBES) {
                return Err(Error::unsupported("function meets too many cubes"));
            }
            let mut stack: Vec<Vec<i64>> = vec![Vec::new()];
            for options in &per_coord {
                stack = stack
                    .into_iter()
                    .flat_map(|prefix| {
                        options.iter().map(move |a| {
                            let mut p = prefix.clone();
                            p.push(*a);
                            p
                        })
                    })
                    .collect();
            }
            found.extend(stack.iter().map(|v| CubeIndex::from_dense(v)));
            if found.len() > MAX_CUBES {
                return Err(Error::unsupported("function meets too many cubes"));
            }
        }
        Ok(found.into_iter().collect())
    }

    /// `int_{cube} |f|^p` for the cube of `a` in the lattice through `lattice`.
    fn cube_integral(&self, a: &CubeIndex, lattice: &Rational, p: &Rational) -> Result<Real> {
        let level = self.f.level.max(a.support_end());
        let f = self.f.embed(&self.frame, level)?;
        let tail = FactorSpace::Line.intersect(&self.frame.unit_set(), &cube_set(lattice, 0))?;
        if FactorSpace::Line.measure(&tail)? != Extended::one() {
            // Every tail coordinate loses mass, so the infinite product vanishes.
            return Ok(Real::zero());
        }
        let mut total = Real::zero();
        for t in &f.terms {
            let mut m = Rational::one();
            for (i, s) in t.cell.iter().enumerate() {
                let piece = FactorSpace::Line.intersect(s, &cube_set(lattice, a.get(i + 1)))?;
                m *= FactorSpace::Line.measure(&piece)?.finite().cloned().unwrap_or_default();
                if m.is_zero() {
                    break;
                }
            }
            if !m.is_zero() {
                total = total.add(&rational_power(&t.coeff.abs(), p).mul(&Real::Exact(m)));
            }
        }
        Ok(total)
    }

    /// `sum_a int_{cube a} |f|^p` over the cubes of the function's own lattice.
    pub fn integral_by_cubes(&self, p: &Rational) -> Result<CubeBreakdown> {
        self.integral_by_cubes_on_lattice(p, &self.frame.offset.clone())
    }

    /// The same sum over cubes `[lattice + a_i, lattice + a_i + 1)` indexed by
    /// finitely supported `a`.
    pub fn integral_by_cubes_on_lattice(&self, p: &Rational, lattice: &Rational) -> Result<CubeBreakdown> {
        check_p(p)?;
        let mut pieces = Vec::new();
        let mut total = Real::zero();
        for a in self.support_on(lattice)? {
            let v = self.cube_integral(&a, lattice, p)?;
            if v != Real::zero() {
                total = total.add(&v);
                pieces.push((a, v));
            }
        }
        Ok(CubeBreakdown { pieces, total, direct: self.norm_pow(p)? })
    }

    /// `f o T_a^{-1}` restricted to `[0,1)^N`, where `T_a` maps the cube of
    /// `a` onto `[0,1)^N`.
    pub fn translate_to_unit(&self, a: &CubeIndex) -> Result<CylinderSimpleFunction> {
        let level = self.f.level.max(a.support_end());
        let f = self.f.embed(&self.frame, level)?;
        let unit = unit_cube_ambient();
        let mut terms = Vec::new();
        'terms: for t in &f.terms {
            let mut cell = Vec::with_capacity(level);
            for (i, s) in t.cell.iter().enumerate() {
                let corner = &self.frame.offset + int(a.get(i + 1));
                let piece = FactorSpace::Line.intersect(s, &GeneratorSet::unit_from(&corner))?;
                if FactorSpace::Line.is_empty(&piece)? {
                    continue 'terms;
                }
                cell.push(FactorSpace::Line.translate(&piece, &-corner)?);
            }
            terms.push(SimpleTerm { coeff: t.coeff.clone(), cell });
        }
        CylinderSimpleFunction { level, terms }.canonical_sum(&unit)
    }

    /// Decomposition into unit-cube components.
    pub fn frak_p(&self) -> Result<DirectSumElement> {
        let mut components = BTreeMap::new();
        for a in self.cube_support()? {
            let g = self.translate_to_unit(&a)?;
            if !g.terms.is_empty() {
                components.insert(a, g);
            }
        }
        Ok(DirectSumElement { offset: self.frame.offset.clone(), components })
    }

    pub fn eval(&self, x: &[crate::factor::Coord]) -> Result<Rational> {
        self.f.eval(&self.frame, x)
    }
}

impl fmt::Display for RnFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (tail offset {})", self.f, self.frame.offset)
    }
}

/// Finitely many nonzero components `f_a` in `L_p([0,1)^N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSumElement {
    /// Lattice offset used to place the components back.
    pub offset: Rational,
    pub components: BTreeMap<CubeIndex, CylinderSimpleFunction>,
}

impl DirectSumElement {
    pub fn empty(offset: Rational) -> Self {
        DirectSumElement { offset, components: BTreeMap::new() }
    }

    /// `sum_a int |f_a|^p`.
    pub fn oplus_norm_pow(&self, p: &Rational) -> Result<Real> {
        check_p(p)?;
        let unit = unit_cube_ambient();
        let mut total = Real::zero();
        for g in self.components.values() {
            total = total.add(&unit.norm_pow(g, p)?);
        }
        Ok(total)
    }

    pub fn oplus_norm(&self, p: &Rational) -> Result<LpNorm> {
        let pth_power = self.oplus_norm_pow(p)?;
        Ok(LpNorm { p: p.clone(), norm: pth_power.root(p), pth_power })
    }

    /// Components in canonical form, with zero components dropped.
    pub fn canonical(&self) -> Result<DirectSumElement> {
        let unit = unit_cube_ambient();
        let mut components = BTreeMap::new();
        for (a, g) in &self.components {
            let g = g.canonical(&unit)?;
            if !g.terms.is_empty() {
                components.insert(a.clone(), g);
            }
        }
        Ok(DirectSumElement { offset: self.offset.clone(), components })
    }

    /// `sum_a (f_a o T_a) chi_{cube a}`.
    pub fn frak_p_inv(&self) -> Result<RnFunction> {
        let unit = unit_cube_ambient();
        let frame = RnFrame { offset: self.offset.clone() };
        let mut level = 0;
        let mut placed = Vec::new();
        for (a, g) in &self.components {
            let g = g.validated(&unit)?;
            let here = g.level.max(a.support_end());
            let g = g.embed(&unit, here)?;
            level = level.max(here);
            for t in g.terms {
                let mut cell = Vec::with_capacity(here);
                for (i, s) in t.cell.iter().enumerate() {
                    cell.push(FactorSpace::Line.translate(s, &(&self.offset + int(a.get(i + 1))))?);
                }
                placed.push(SimpleTerm { coeff: t.coeff, cell });
            }
        }
        let mut terms = Vec::with_capacity(placed.len());
        for mut t in placed {
            let from = t.cell.len();
            t.cell.extend((from + 1..=level).map(|i| frame.implicit_set(i)));
            terms.push(t);
        }
        RnFunction::new(self.offset.clone(), CylinderSimpleFunction { level, terms })
    }
}
