//! Rectangles of the product space: finitely many constrained head
//! coordinates followed by a tail rule.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::factor::{Coord, FactorSequence, FactorSpace, GeneratorSet};
use crate::numeric::{Extended, Rational};
use crate::product::{default_precision, ProductValue, SequenceRule};

/// Sets used at every coordinate beyond the head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TailSpec {
    /// Whole factor (cylinder rectangles).
    Full,
    /// A fixed set of measure exactly 1.
    Unit(GeneratorSet),
    /// `[start, start + a_i)` at coordinate `i`, with `a_i` from a rational rule
    /// indexed by absolute coordinate.
    General { start: Rational, lengths: SequenceRule },
}

/// `head_1 x ... x head_m x tail_{m+1} x tail_{m+2} x ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rectangle {
    factors: Arc<FactorSequence>,
    head: Vec<GeneratorSet>,
    tail: TailSpec,
}

/// Translation vector: explicit head shifts, then a constant shift on the tail.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Shift {
    pub head: Vec<Rational>,
    pub tail: Rational,
}

impl Shift {
    pub fn at(&self, i: usize) -> &Rational {
        self.head.get(i - 1).unwrap_or(&self.tail)
    }

    pub fn is_zero(&self) -> bool {
        self.tail.is_zero() && self.head.iter().all(Zero::is_zero)
    }
}

/// A point with finitely many explicit coordinates and a constant tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub head: Vec<Coord>,
    pub tail: Coord,
}

impl Point {
    pub fn coord(&self, i: usize) -> &Coord {
        self.head.get(i - 1).unwrap_or(&self.tail)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for c in &self.head {
            write!(f, "{c}, ")?;
        }
        write!(f, "{}, {}, ...)", self.tail, self.tail)
    }
}

fn same_factors(a: &Arc<FactorSequence>, b: &Arc<FactorSequence>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::precondition("rectangles live over different factor sequences"))
    }
}

impl TailSpec {
    fn set_at(&self, i: usize) -> GeneratorSet {
        match self {
            TailSpec::Full => GeneratorSet::Full,
            TailSpec::Unit(s) => s.clone(),
            TailSpec::General { start, lengths } => {
                let len = lengths.rational_term(i).expect("validated rational rule");
                GeneratorSet::interval(start.clone(), start + len)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TailSpec::Full => "full",
            TailSpec::Unit(_) => "unit",
            TailSpec::General { .. } => "general",
        }
    }

    /// Whether every tail set of `self` lies in the matching set of `other`.
    fn included_in(&self, other: &TailSpec, factor: &FactorSpace) -> Result<bool> {
        Ok(match (self, other) {
            (_, TailSpec::Full) => true,
            (a, b) if a == b => true,
            (TailSpec::Unit(s), TailSpec::Unit(t)) => factor.is_subset(s, t)?,
            (TailSpec::Full, _) => false,
            _ => {
                return Err(Error::tails(format!(
                    "cannot decide inclusion of a {} tail in a {} tail",
                    self.kind_name(),
                    other.kind_name()
                )))
            }
        })
    }
}

impl fmt::Display for TailSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailSpec::Full => f.write_str("full tail"),
            TailSpec::Unit(s) => write!(f, "unit tail {s}"),
            TailSpec::General { start, lengths } => write!(f, "general tail from {start} with lengths {lengths:?}"),
        }
    }
}

impl Rectangle {
    /// Validates and canonicalizes a rectangle.
    pub fn new(factors: Arc<FactorSequence>, head: Vec<GeneratorSet>, tail: TailSpec) -> Result<Self> {
        let tail = Self::check_tail(&factors, tail)?;
        Self::with_checked_tail(factors, head, tail)
    }

    /// As [`Rectangle::new`] for a tail already validated against `factors`.
    fn with_checked_tail(factors: Arc<FactorSequence>, head: Vec<GeneratorSet>, tail: TailSpec) -> Result<Self> {
        let mut sets = Vec::with_capacity(head.len().max(factors.prefix.len()));
        for (k, s) in head.iter().enumerate() {
            sets.push(factors.factor(k + 1).canonicalize(s).map_err(|e| {
                Error::new(e.kind(), format!("coordinate {}: {}", k + 1, e.message()))
            })?);
        }
        for i in sets.len() + 1..=factors.prefix.len() {
            sets.push(factors.factor(i).canonicalize(&tail.set_at(i))?);
        }
        let mut rect = Rectangle { factors, head: sets, tail };
        rect.strip();
        Ok(rect)
    }

    /// The whole space.
    pub fn full(factors: Arc<FactorSequence>) -> Self {
        Rectangle::new(factors, Vec::new(), TailSpec::Full).expect("full space is valid")
    }

    fn check_tail(factors: &FactorSequence, tail: TailSpec) -> Result<TailSpec> {
        let factor = &factors.tail;
        match tail {
            TailSpec::Full => Ok(TailSpec::Full),
            TailSpec::Unit(s) => {
                let s = factor.canonicalize(&s)?;
                for f in factors.prefix.iter().chain([factor]) {
                    let m = f.measure(&s)?;
                    if m != Extended::one() {
                        return Err(Error::precondition(format!("unit tail set {s} has measure {m} on a {} factor", f.kind_name())));
                    }
                }
                Ok(if s == GeneratorSet::Full { TailSpec::Full } else { TailSpec::Unit(s) })
            }
            TailSpec::General { start, lengths } => {
                lengths.validate()?;
                if !lengths.has_rational_terms() {
                    return Err(Error::precondition("general tail lengths must be rational"));
                }
                if let SequenceRule::ClosedForm { certificate: None, family, .. } = &lengths {
                    return Err(Error::precondition(format!(
                        "general tail with {} lengths needs a convergence certificate",
                        family.name()
                    )));
                }
                for f in factors.prefix.iter().chain([factor]) {
                    match f {
                        FactorSpace::Line => {}
                        FactorSpace::UnitInterval => {
                            let sup = lengths.rational_sup().expect("rational rule");
                            if start.is_negative() || &start + sup > Rational::one() {
                                return Err(Error::domain("general tail intervals leave [0, 1)"));
                            }
                        }
                        FactorSpace::Discrete(_) => {
                            return Err(Error::unsupported("general tails on discrete factors"));
                        }
                    }
                }
                Ok(TailSpec::General { start, lengths })
            }
        }
    }

    fn strip(&mut self) {
        while self.head.len() > self.factors.prefix.len() {
            let i = self.head.len();
            let expected = self.factors.factor(i).canonicalize(&self.tail.set_at(i)).expect("valid tail");
            if self.head[i - 1] == expected {
                self.head.pop();
            } else {
                break;
            }
        }
    }

    pub fn factors(&self) -> &Arc<FactorSequence> {
        &self.factors
    }

    pub fn head(&self) -> &[GeneratorSet] {
        &self.head
    }

    pub fn tail(&self) -> &TailSpec {
        &self.tail
    }

    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    pub fn factor(&self, i: usize) -> &FactorSpace {
        self.factors.factor(i)
    }

    /// Set at the 1-based coordinate `i`.
    pub fn set_at(&self, i: usize) -> GeneratorSet {
        match self.head.get(i - 1) {
            Some(s) => s.clone(),
            None => self.factor(i).canonicalize(&self.tail.set_at(i)).expect("valid tail"),
        }
    }

    /// Measure of the set at coordinate `i`.
    pub fn measure_at(&self, i: usize) -> Extended {
        self.factor(i).measure(&self.set_at(i)).expect("valid set")
    }

    /// Same tail, with head sets `sets` (extended by the tail where shorter).
    pub fn with_head(&self, sets: Vec<GeneratorSet>) -> Result<Rectangle> {
        Rectangle::with_checked_tail(self.factors.clone(), sets, self.tail.clone())
    }

    /// Head sets up to coordinate `len`, filled from the tail.
    pub fn head_to(&self, len: usize) -> Vec<GeneratorSet> {
        (1..=len).map(|i| self.set_at(i)).collect()
    }

    /// Whether this is a cylinder rectangle (full tail).
    pub fn is_cylinder(&self) -> bool {
        self.tail == TailSpec::Full
    }

    pub fn is_empty(&self) -> bool {
        for (k, s) in self.head.iter().enumerate() {
            if self.factor(k + 1).is_empty(s).expect("valid set") {
                return true;
            }
        }
        match &self.tail {
            TailSpec::Full => self.factors.tail.is_empty(&GeneratorSet::Full).expect("valid set"),
            TailSpec::Unit(_) => false,
            TailSpec::General { lengths, .. } => lengths.first_zero_after(self.head.len()).is_some(),
        }
    }

    /// Product of the head measures.
    pub fn head_measure(&self) -> Extended {
        (1..=self.head.len()).fold(Extended::one(), |acc, i| acc * self.measure_at(i))
    }

    /// Value of the infinite tail product beyond the head.
    pub fn tail_value(&self, precision: &Rational) -> Result<ProductValue> {
        match &self.tail {
            TailSpec::Full => Ok(match self.factors.tail.total() {
                Extended::Infinite => ProductValue::PlusInfinity,
                Extended::Finite(t) => match t.cmp(&Rational::one()) {
                    Ordering::Equal => ProductValue::one(),
                    Ordering::Less => ProductValue::Zero,
                    Ordering::Greater => ProductValue::PlusInfinity,
                },
            }),
            TailSpec::Unit(_) => Ok(ProductValue::one()),
            TailSpec::General { lengths, .. } => lengths.tail_from(self.head.len()).classify(precision),
        }
    }

    /// Volume `prod_i mu_i(C_i)` with the default precision.
    pub fn vol(&self) -> Result<ProductValue> {
        self.vol_with(&default_precision())
    }

    pub fn vol_with(&self, precision: &Rational) -> Result<ProductValue> {
        let head = self.head_measure();
        if head.is_zero() {
            return Ok(ProductValue::Zero);
        }
        let tail = self.tail_value(precision)?;
        let value = match head {
            Extended::Infinite => match tail {
                ProductValue::Zero => ProductValue::Zero,
                ProductValue::Indeterminate => ProductValue::Indeterminate,
                _ => ProductValue::PlusInfinity,
            },
            Extended::Finite(h) => ProductValue::exact(h).mul(&tail),
        };
        if value == ProductValue::Indeterminate {
            return Err(Error::inconclusive("tail product oscillates, so the volume is undefined"));
        }
        Ok(value)
    }

    /// Coordinatewise intersection.
    pub fn intersect(&self, other: &Rectangle) -> Result<Rectangle> {
        same_factors(&self.factors, &other.factors)?;
        let tail = match (&self.tail, &other.tail) {
            (TailSpec::Full, t) | (t, TailSpec::Full) => t.clone(),
            (a, b) if a == b => a.clone(),
            (a, b) => {
                return Err(Error::tails(format!(
                    "cannot intersect a {} tail with a different {} tail",
                    a.kind_name(),
                    b.kind_name()
                )))
            }
        };
        let len = self.head.len().max(other.head.len());
        let mut head = Vec::with_capacity(len);
        for i in 1..=len {
            head.push(self.factor(i).intersect(&self.set_at(i), &other.set_at(i))?);
        }
        Rectangle::with_checked_tail(self.factors.clone(), head, tail)
    }

    /// `self \ other` as disjoint rectangles with the tail of `self`. Finite
    /// whenever the tail of `self` lies in the tail of `other`.
    pub fn difference(&self, other: &Rectangle) -> Result<Vec<Rectangle>> {
        same_factors(&self.factors, &other.factors)?;
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if !self.tail.included_in(&other.tail, &self.factors.tail)? {
            return Err(Error::tails(format!(
                "difference with a {} tail not containing the {} tail is an infinite union",
                other.tail.kind_name(),
                self.tail.kind_name()
            )));
        }
        let len = self.head.len().max(other.head.len());
        let mut pieces = Vec::new();
        let mut common: Vec<GeneratorSet> = Vec::with_capacity(len);
        for n in 1..=len {
            let f = self.factor(n);
            let (a, b) = (self.set_at(n), other.set_at(n));
            let outside = f.difference(&a, &b)?;
            if !f.is_empty(&outside)? {
                let mut head = common.clone();
                head.push(outside);
                head.extend((n + 1..=len).map(|i| self.set_at(i)));
                let piece = self.with_head(head)?;
                if !piece.is_empty() {
                    pieces.push(piece);
                }
            }
            let inside = f.intersect(&a, &b)?;
            if f.is_empty(&inside)? {
                break;
            }
            common.push(inside);
        }
        Ok(pieces)
    }

    /// Restartable iterator over the nonempty terms of the complement
    /// decomposition `C_1 x ... x C_{n-1} x C_n^c x Omega x ...`.
    pub fn complement_terms(&self) -> ComplementTerms {
        let mut limit = if self.is_cylinder() { Some(self.head.len()) } else { None };
        if let Some(k) = (1..=self.head.len()).find(|&i| self.factor(i).is_empty(&self.head[i - 1]).unwrap_or(false)) {
            limit = Some(k);
        }
        if let TailSpec::General { lengths, .. } = &self.tail {
            if let Some(z) = lengths.first_zero_after(self.head.len()) {
                limit = Some(limit.map_or(z, |l| l.min(z)));
            }
        }
        ComplementTerms { rect: self.clone(), next: 1, limit }
    }

    /// First `depth` complement terms and whether the decomposition is finished.
    pub fn complement_stream(&self, depth: usize) -> Result<ComplementStream> {
        let mut it = self.complement_terms();
        let mut terms = Vec::new();
        while terms.len() < depth {
            match it.next() {
                Some(t) => terms.push(t?),
                None => return Ok(ComplementStream { terms, exhausted: true }),
            }
        }
        let exhausted = it.clone().next().is_none();
        Ok(ComplementStream { terms, exhausted })
    }

    pub fn is_subset(&self, other: &Rectangle) -> Result<bool> {
        same_factors(&self.factors, &other.factors)?;
        if self.is_empty() {
            return Ok(true);
        }
        let len = self.head.len().max(other.head.len());
        for i in 1..=len {
            if !self.factor(i).is_subset(&self.set_at(i), &other.set_at(i))? {
                return Ok(false);
            }
        }
        self.tail.included_in(&other.tail, &self.factors.tail)
    }

    pub fn is_disjoint(&self, other: &Rectangle) -> Result<bool> {
        same_factors(&self.factors, &other.factors)?;
        if self.is_empty() || other.is_empty() {
            return Ok(true);
        }
        let len = self.head.len().max(other.head.len());
        for i in 1..=len {
            if self.factor(i).is_disjoint(&self.set_at(i), &other.set_at(i))? {
                return Ok(true);
            }
        }
        let tail_factor = &self.factors.tail;
        match (&self.tail, &other.tail) {
            (TailSpec::Full, _) | (_, TailSpec::Full) => Ok(false),
            (a, b) if a == b => Ok(false),
            (TailSpec::Unit(s), TailSpec::Unit(t)) => tail_factor.is_disjoint(s, t),
            (a, b) => Err(Error::tails(format!(
                "cannot decide disjointness of a {} tail and a {} tail",
                a.kind_name(),
                b.kind_name()
            ))),
        }
    }

    /// Coordinatewise translation; shifted coordinates must be on the line.
    pub fn translated(&self, shift: &Shift) -> Result<Rectangle> {
        let len = self.head.len().max(shift.head.len());
        let mut head = Vec::with_capacity(len);
        for i in 1..=len {
            let t = shift.at(i);
            let s = self.set_at(i);
            head.push(if t.is_zero() { s } else { self.factor(i).translate(&s, t)? });
        }
        let t = &shift.tail;
        let tail = if t.is_zero() {
            self.tail.clone()
        } else {
            if !self.factors.tail.is_line() {
                return Err(Error::unsupported(format!(
                    "translation of the tail on a {} factor",
                    self.factors.tail.kind_name()
                )));
            }
            match &self.tail {
                TailSpec::Full => TailSpec::Full,
                TailSpec::Unit(s) => TailSpec::Unit(self.factors.tail.translate(s, t)?),
                TailSpec::General { start, lengths } => {
                    TailSpec::General { start: start + t, lengths: lengths.clone() }
                }
            }
        };
        Rectangle::new(self.factors.clone(), head, tail)
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        let len = self.head.len().max(p.head.len());
        for i in 1..=len {
            if !self.factor(i).contains(&self.set_at(i), p.coord(i))? {
                return Ok(false);
            }
        }
        let factor = &self.factors.tail;
        match &self.tail {
            TailSpec::Full => factor.contains(&GeneratorSet::Full, &p.tail),
            TailSpec::Unit(s) => factor.contains(s, &p.tail),
            TailSpec::General { start, lengths } => {
                let Coord::Real(x) = &p.tail else {
                    return Err(Error::domain("atom coordinate on an interval factor"));
                };
                let Some(shortest) = lengths.rational_inf_after(len) else {
                    return Err(Error::unsupported("membership test for this general tail"));
                };
                Ok(x >= start && x - start < shortest)
            }
        }
    }

    /// Some point of the rectangle, or `None` if it is empty.
    pub fn sample_point(&self) -> Result<Option<Point>> {
        if self.is_empty() {
            return Ok(None);
        }
        let mut head = Vec::with_capacity(self.head.len());
        for i in 1..=self.head.len() {
            match self.factor(i).sample_point(&self.head[i - 1])? {
                Some(c) => head.push(c),
                None => return Ok(None),
            }
        }
        let tail = match &self.tail {
            TailSpec::Full => self.factors.tail.sample_point(&GeneratorSet::Full)?,
            TailSpec::Unit(s) => self.factors.tail.sample_point(s)?,
            TailSpec::General { start, .. } => Some(Coord::Real(start.clone())),
        };
        Ok(tail.map(|tail| Point { head, tail }))
    }

    /// Deterministic ordering of rectangles over the same factors.
    pub fn cmp_key(&self, other: &Rectangle) -> Ordering {
        (&self.head, &self.tail).cmp(&(&other.head, &other.tail))
    }
}

impl fmt::Display for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.head {
            write!(f, "{s} x ")?;
        }
        write!(f, "{}", self.tail)
    }
}

/// Iterator behind [`Rectangle::complement_stream`].
#[derive(Clone, Debug)]
pub struct ComplementTerms {
    rect: Rectangle,
    next: usize,
    /// Last index that can carry a nonempty term, if finite.
    limit: Option<usize>,
}

impl Iterator for ComplementTerms {
    type Item = Result<Rectangle>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let n = self.next;
            if self.limit.is_some_and(|l| n > l) {
                return None;
            }
            self.next += 1;
            let f = self.rect.factor(n);
            let term = (|| {
                let outside = f.complement(&self.rect.set_at(n))?;
                let mut head = self.rect.head_to(n - 1);
                head.push(outside);
                Rectangle::with_checked_tail(self.rect.factors.clone(), head, TailSpec::Full)
            })();
            match term {
                Ok(t) if t.is_empty() => continue,
                other => return Some(other),
            }
        }
    }
}

/// Truncated complement decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementStream {
    pub terms: Vec<Rectangle>,
    /// True when no further nonempty terms exist.
    pub exhausted: bool,
}

/// Common refinement of rectangles that share a tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub atoms: Vec<Rectangle>,
    /// For each atom, the sorted indices of the input rectangles containing it.
    pub members: Vec<Vec<usize>>,
}

impl Refinement {
    /// Atoms making up input rectangle `k`.
    pub fn atoms_of(&self, k: usize) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&a| self.members[a].binary_search(&k).is_ok()).collect()
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Splits rectangles with a common tail into disjoint atoms.
pub fn refine(rects: &[Rectangle]) -> Result<Refinement> {
    let Some(first) = rects.first() else {
        return Ok(Refinement { atoms: Vec::new(), members: Vec::new() });
    };
    for r in &rects[1..] {
        same_factors(&first.factors, &r.factors)?;
        if r.tail != first.tail {
            return Err(Error::tails(format!(
                "refinement needs a common tail, found {} and {}",
                first.tail.kind_name(),
                r.tail.kind_name()
            )));
        }
    }
    let live: Vec<usize> = (0..rects.len()).filter(|&k| !rects[k].is_empty()).collect();
    if live.is_empty() {
        return Ok(Refinement { atoms: Vec::new(), members: Vec::new() });
    }
    let len = rects.iter().map(Rectangle::head_len).max().unwrap_or(0);
    let mut parts = Vec::with_capacity(len);
    for i in 1..=len {
        let sets: Vec<GeneratorSet> = live.iter().map(|&k| rects[k].set_at(i)).collect();
        let mut pieces = first.factor(i).partition(&sets)?;
        for (_, members) in pieces.iter_mut() {
            for m in members.iter_mut() {
                *m = live[*m];
            }
        }
        parts.push(pieces);
    }
    let mut out = Refinement { atoms: Vec::new(), members: Vec::new() };
    let mut cells = Vec::with_capacity(len);
    descend(first, &parts, 0, live, &mut cells, &mut out)?;
    Ok(out)
}

fn descend(
    template: &Rectangle,
    parts: &[Vec<(GeneratorSet, Vec<usize>)>],
    depth: usize,
    current: Vec<usize>,
    cells: &mut Vec<GeneratorSet>,
    out: &mut Refinement,
) -> Result<()> {
    if depth == parts.len() {
        out.atoms.push(template.with_head(cells.clone())?);
        out.members.push(current);
        return Ok(());
    }
    for (piece, members) in &parts[depth] {
        let next = intersect_sorted(&current, members);
        if next.is_empty() {
            continue;
        }
        cells.push(piece.clone());
        descend(template, parts, depth + 1, next, cells, out)?;
        cells.pop();
    }
    Ok(())
}

/// A finite union of pairwise disjoint rectangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectUnion {
    members: Vec<Rectangle>,
}

impl RectUnion {
    /// Drops empty members, verifies disjointness and orders canonically.
    pub fn new(rects: Vec<Rectangle>) -> Result<Self> {
        let mut members: Vec<Rectangle> = rects.into_iter().filter(|r| !r.is_empty()).collect();
        if let Some(first) = members.first() {
            if members.iter().all(|r| r.tail == first.tail) {
                let refinement = refine(&members)?;
                if let Some(k) = refinement.members.iter().position(|m| m.len() > 1) {
                    let m = &refinement.members[k];
                    return Err(Error::overlap(format!(
                        "members {} and {} share the atom {}",
                        m[0],
                        m[1],
                        refinement.atoms[k]
                    )));
                }
            } else {
                for a in 0..members.len() {
                    for b in a + 1..members.len() {
                        if !members[a].is_disjoint(&members[b])? {
                            let common = members[a].intersect(&members[b])?;
                            return Err(Error::overlap(format!("members {a} and {b} share {common}")));
                        }
                    }
                }
            }
        }
        members.sort_by(Rectangle::cmp_key);
        Ok(RectUnion { members })
    }

    pub fn empty() -> Self {
        RectUnion { members: Vec::new() }
    }

    pub fn members(&self) -> &[Rectangle] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use crate::product::Family;
    use alloc::vec;
    use proptest::prelude::*;

    fn unit_factors() -> Arc<FactorSequence> {
        Arc::new(FactorSequence::uniform(FactorSpace::UnitInterval))
    }

    fn line_factors() -> Arc<FactorSequence> {
        Arc::new(FactorSequence::uniform(FactorSpace::Line))
    }

    fn iv(a: Rational, b: Rational) -> GeneratorSet {
        GeneratorSet::interval(a, b)
    }

    fn unit_tail() -> TailSpec {
        TailSpec::Unit(iv(int(0), int(1)))
    }

    #[test]
    fn volume_examples() {
        let r = Rectangle::new(unit_factors(), vec![iv(int(0), rat(1, 2)), iv(int(0), rat(1, 3))], TailSpec::Full).unwrap();
        assert_eq!(r.vol().unwrap(), ProductValue::Exact(rat(1, 6)));
        let cube = Rectangle::new(line_factors(), vec![iv(int(3), int(4)), iv(int(-2), int(-1))], unit_tail()).unwrap();
        assert_eq!(cube.vol().unwrap(), ProductValue::one());
        let null = Rectangle::new(unit_factors(), vec![iv(int(0), int(0))], TailSpec::Full).unwrap();
        assert_eq!(null.vol().unwrap(), ProductValue::Zero);
        let cylinder = Rectangle::new(line_factors(), vec![iv(int(0), int(1))], TailSpec::Full).unwrap();
        assert_eq!(cylinder.vol().unwrap(), ProductValue::PlusInfinity);
    }

    #[test]
    fn canonical_form_strips_tail_copies() {
        let r = Rectangle::new(line_factors(), vec![iv(int(0), int(2)), iv(int(0), int(1)), iv(int(0), int(1))], unit_tail())
            .unwrap();
        assert_eq!(r.head_len(), 1);
        let unit = Rectangle::new(unit_factors(), vec![GeneratorSet::Full], unit_tail()).unwrap();
        assert_eq!(unit, Rectangle::full(unit_factors()));
    }

    #[test]
    fn general_tail_volume() {
        let fam = Family::OneMinusGeometric { ratio: rat(1, 2) };
        let lengths = SequenceRule::closed_form(fam.clone(), fam.default_certificate()).unwrap();
        let r = Rectangle::new(unit_factors(), Vec::new(), TailSpec::General { start: int(0), lengths }).unwrap();
        let ProductValue::Interval(v) = r.vol().unwrap() else { panic!() };
        assert!(v.lo <= rat(28878809508, 100_000_000_000) && v.hi >= rat(28878809509, 100_000_000_000));
        let uncertified = SequenceRule::closed_form(fam, None).unwrap();
        assert!(Rectangle::new(unit_factors(), Vec::new(), TailSpec::General { start: int(0), lengths: uncertified })
            .is_err());
    }

    #[test]
    fn intersection_examples() {
        let a = Rectangle::new(unit_factors(), vec![iv(int(0), rat(1, 2))], TailSpec::Full).unwrap();
        let b = Rectangle::new(unit_factors(), vec![iv(rat(1, 4), rat(3, 4))], TailSpec::Full).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.head(), &[iv(rat(1, 4), rat(1, 2))]);
        assert_eq!(c.vol().unwrap(), ProductValue::Exact(rat(1, 4)));
        assert_eq!(a.intersect(&Rectangle::full(unit_factors())).unwrap(), a);
    }

    #[test]
    fn cylinder_meets_finite_rectangle() {
        let cyl = Rectangle::new(line_factors(), vec![iv(int(0), rat(1, 2))], TailSpec::Full).unwrap();
        let fin = Rectangle::new(line_factors(), vec![iv(int(0), int(1)), iv(int(0), int(3))], unit_tail()).unwrap();
        let both = cyl.intersect(&fin).unwrap();
        let v = both.vol().unwrap();
        assert!(v.is_finite());
        assert_eq!(v, ProductValue::Exact(rat(3, 2)));
        assert!(v.certainly_le(&fin.vol().unwrap()).unwrap());
    }

    #[test]
    fn incompatible_tails() {
        let a = Rectangle::new(line_factors(), Vec::new(), unit_tail()).unwrap();
        let b = Rectangle::new(line_factors(), Vec::new(), TailSpec::Unit(iv(int(5), int(6)))).unwrap();
        assert_eq!(a.intersect(&b).unwrap_err().kind(), crate::ErrorKind::IncompatibleTails);
    }

    #[test]
    fn complement_of_square() {
        let r = Rectangle::new(unit_factors(), vec![iv(int(0), rat(1, 2)), iv(int(0), rat(1, 2))], TailSpec::Full).unwrap();
        let s = r.complement_stream(10).unwrap();
        assert!(s.exhausted);
        assert_eq!(s.terms.len(), 2);
        assert_eq!(s.terms[0].head(), &[iv(rat(1, 2), int(1))]);
        assert_eq!(s.terms[1].head(), &[iv(int(0), rat(1, 2)), iv(rat(1, 2), int(1))]);
        let total = s.terms.iter().fold(ProductValue::Zero, |acc, t| acc.add(&t.vol().unwrap()));
        assert_eq!(total, ProductValue::Exact(rat(3, 4)));
        let whole = Rectangle::full(unit_factors()).complement_stream(5).unwrap();
        assert!(whole.terms.is_empty() && whole.exhausted);
    }

    #[test]
    fn complement_of_finite_rectangle_is_infinite() {
        let r = Rectangle::new(line_factors(), vec![iv(int(0), int(1))], unit_tail()).unwrap();
        let s = r.complement_stream(4).unwrap();
        assert_eq!(s.terms.len(), 4);
        assert!(!s.exhausted);
    }

    #[test]
    fn refine_two_overlapping() {
        let a = Rectangle::new(unit_factors(), vec![iv(int(0), rat(1, 2))], TailSpec::Full).unwrap();
        let b = Rectangle::new(unit_factors(), vec![iv(rat(1, 4), int(1))], TailSpec::Full).unwrap();
        let r = refine(&[a.clone(), b]).unwrap();
        assert_eq!(r.atoms.len(), 3);
        assert_eq!(r.members, vec![vec![0], vec![0, 1], vec![1]]);
        assert_eq!(r.atoms[1].head(), &[iv(rat(1, 4), rat(1, 2))]);
        let single = refine(&[a.clone()]).unwrap();
        assert_eq!(single.atoms, vec![a]);
    }

    #[test]
    fn disjoint_and_subset() {
        let a = Rectangle::new(unit_factors(), vec![iv(int(0), rat(1, 2))], TailSpec::Full).unwrap();
        let b = Rectangle::new(unit_factors(), vec![iv(rat(1, 2), int(1))], TailSpec::Full).unwrap();
        assert!(a.is_disjoint(&b).unwrap());
        assert!(a.is_subset(&a).unwrap());
        let c0 = Rectangle::new(line_factors(), vec![iv(int(0), int(1))], unit_tail()).unwrap();
        let c1 = Rectangle::new(line_factors(), vec![iv(int(0), int(1)), iv(int(1), int(2))], unit_tail()).unwrap();
        assert!(c0.is_disjoint(&c1).unwrap());
    }

    #[test]
    fn overlapping_union_rejected() {
        let a = Rectangle::new(unit_factors(), vec![iv(int(0), rat(1, 2))], TailSpec::Full).unwrap();
        let b = Rectangle::new(unit_factors(), vec![iv(rat(1, 4), int(1))], TailSpec::Full).unwrap();
        assert_eq!(RectUnion::new(vec![a, b]).unwrap_err().kind(), crate::ErrorKind::Overlap);
    }

    fn dyadic_set() -> impl Strategy<Value = GeneratorSet> {
        (0i64..8, 1i64..5).prop_map(|(a, len)| iv(rat(a, 8), rat((a + len).min(8), 8)))
    }

    fn unit_rect() -> impl Strategy<Value = Rectangle> {
        proptest::collection::vec(dyadic_set(), 0..4)
            .prop_map(|head| Rectangle::new(unit_factors(), head, TailSpec::Full).unwrap())
    }

    fn unit_point() -> impl Strategy<Value = Point> {
        (proptest::collection::vec(0i64..16, 4), 0i64..16).prop_map(|(h, t)| Point {
            head: h.into_iter().map(|x| Coord::Real(rat(x, 16))).collect(),
            tail: Coord::Real(rat(t, 16)),
        })
    }

    proptest! {
        #[test]
        fn head_extension_multiplies_volume(r in unit_rect(), s in dyadic_set()) {
            let mut head = r.head_to(4);
            head.push(s.clone());
            let longer = r.with_head(head).unwrap();
            let m = FactorSpace::UnitInterval.measure(&s).unwrap().finite().unwrap().clone();
            prop_assert_eq!(longer.vol().unwrap(), r.vol().unwrap().scale(&m));
        }

        #[test]
        fn intersection_volume_bounded(a in unit_rect(), b in unit_rect()) {
            let c = a.intersect(&b).unwrap();
            let v = c.vol().unwrap();
            prop_assert!(v.certainly_le(&a.vol().unwrap()).unwrap());
            prop_assert!(v.certainly_le(&b.vol().unwrap()).unwrap());
        }

        #[test]
        fn complement_terms_cover_outside_points_once(r in unit_rect(), p in unit_point()) {
            let terms = r.complement_stream(16).unwrap();
            prop_assert!(terms.exhausted);
            let hits = terms.terms.iter().filter(|t| t.contains(&p).unwrap()).count();
            let inside = r.contains(&p).unwrap();
            prop_assert_eq!(hits, if inside { 0 } else { 1 });
        }

        #[test]
        fn refinement_partitions_volume(rs in proptest::collection::vec(unit_rect(), 1..5)) {
            let refinement = refine(&rs).unwrap();
            for (k, r) in rs.iter().enumerate() {
                let total = refinement
                    .atoms_of(k)
                    .into_iter()
                    .fold(ProductValue::Zero, |acc, a| acc.add(&refinement.atoms[a].vol().unwrap()));
                prop_assert_eq!(total, r.vol().unwrap());
            }
            for a in 0..refinement.atoms.len() {
                for b in a + 1..refinement.atoms.len() {
                    prop_assert!(refinement.atoms[a].is_disjoint(&refinement.atoms[b]).unwrap());
                }
            }
        }

        #[test]
        fn difference_is_disjoint_from_subtrahend(a in unit_rect(), b in unit_rect(), p in unit_point()) {
            let pieces = a.difference(&b).unwrap();
            let hits = pieces.iter().filter(|t| t.contains(&p).unwrap()).count();
            let expected = a.contains(&p).unwrap() && !b.contains(&p).unwrap();
            prop_assert_eq!(hits, usize::from(expected));
        }
    }
}
