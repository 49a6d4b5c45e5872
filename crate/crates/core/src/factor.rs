//! One-dimensional factor spaces and their generator sets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{Extended, Rational};

/// Endpoint of a half-open interval; infinite ends only occur on the line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(q) => Some(q),
            _ => None,
        }
    }

    fn shifted(&self, t: &Rational) -> Bound {
        match self {
            Bound::Finite(q) => Bound::Finite(q + t),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Finite(q) => write!(f, "{q}"),
            Bound::PosInf => f.write_str("inf"),
        }
    }
}

/// Half-open interval `[lo, hi)` with `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo: Bound::Finite(lo), hi: Bound::Finite(hi) }
    }

    fn whole_line() -> Self {
        Interval { lo: Bound::NegInf, hi: Bound::PosInf }
    }

    fn unit() -> Self {
        Interval::new(Rational::zero(), Rational::one())
    }

    fn is_valid(&self) -> bool {
        self.lo < self.hi && self.lo != Bound::PosInf && self.hi != Bound::NegInf
    }

    pub fn length(&self) -> Extended {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Extended::Finite(b - a),
            _ => Extended::Infinite,
        }
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        let p = Bound::Finite(x.clone());
        self.lo <= p && p < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        matches!((&self.lo, &self.hi), (Bound::Finite(_), Bound::Finite(_)))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// A named atom with a nonnegative weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub name: String,
    pub weight: Rational,
}

/// A one-dimensional measure space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactorSpace {
    /// The real line with Lebesgue measure.
    Line,
    /// `[0, 1)` with Lebesgue measure.
    UnitInterval,
    /// Finitely many weighted atoms.
    Discrete(Vec<Atom>),
}

/// A measurable set of a factor: the whole space, a finite union of disjoint
/// half-open intervals, or a set of atom names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorSet {
    Full,
    Intervals(Vec<Interval>),
    Atoms(BTreeSet<String>),
}

impl GeneratorSet {
    pub fn interval(lo: Rational, hi: Rational) -> Self {
        if lo < hi {
            GeneratorSet::Intervals(vec![Interval::new(lo, hi)])
        } else {
            GeneratorSet::Intervals(Vec::new())
        }
    }

    /// `[lo, lo + 1)`.
    pub fn unit_from(lo: &Rational) -> Self {
        Self::interval(lo.clone(), lo + Rational::one())
    }

    pub fn atoms<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        GeneratorSet::Atoms(names.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSet::Full => f.write_str("full"),
            GeneratorSet::Intervals(v) if v.is_empty() => f.write_str("{}"),
            GeneratorSet::Intervals(v) => {
                for (k, iv) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" u ")?;
                    }
                    write!(f, "{iv}")?;
                }
                Ok(())
            }
            GeneratorSet::Atoms(a) => {
                f.write_str("{")?;
                for (k, name) in a.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(name)?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Sorts, validates and merges overlapping or adjacent intervals.
fn merge(mut v: Vec<Interval>) -> Vec<Interval> {
    v.retain(Interval::is_valid);
    v.sort();
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

fn intersect_lists(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = core::cmp::max(&a[i].lo, &b[j].lo).clone();
        let hi = core::cmp::min(&a[i].hi, &b[j].hi).clone();
        if lo < hi {
            out.push(Interval { lo, hi });
        }
        if a[i].hi < b[j].hi {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn complement_list(a: &[Interval], universe: &Interval) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut cursor = universe.lo.clone();
    for iv in a {
        if iv.lo > cursor {
            out.push(Interval { lo: cursor.clone(), hi: iv.lo.clone() });
        }
        if iv.hi > cursor {
            cursor = iv.hi.clone();
        }
    }
    if cursor < universe.hi {
        out.push(Interval { lo: cursor, hi: universe.hi.clone() });
    }
    out
}

impl FactorSpace {
    pub fn discrete<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let atoms: Vec<Atom> = atoms.into_iter().map(|(n, w)| Atom { name: n.into(), weight: w }).collect();
        let mut seen = BTreeSet::new();
        for a in &atoms {
            if a.weight.is_negative() {
                return Err(Error::precondition(format!("atom {} has negative weight {}", a.name, a.weight)));
            }
            if !seen.insert(a.name.as_str()) {
                return Err(Error::precondition(format!("duplicate atom name {}", a.name)));
            }
        }
        Ok(FactorSpace::Discrete(atoms))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FactorSpace::Line => "line",
            FactorSpace::UnitInterval => "unit",
            FactorSpace::Discrete(_) => "discrete",
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, FactorSpace::Line)
    }

    fn universe(&self) -> Option<Interval> {
        match self {
            FactorSpace::Line => Some(Interval::whole_line()),
            FactorSpace::UnitInterval => Some(Interval::unit()),
            FactorSpace::Discrete(_) => None,
        }
    }

    fn atom_names(&self) -> BTreeSet<String> {
        match self {
            FactorSpace::Discrete(atoms) => atoms.iter().map(|a| a.name.clone()).collect(),
            _ => BTreeSet::new(),
        }
    }

    fn weight(&self, name: &str) -> Rational {
        match self {
            FactorSpace::Discrete(atoms) => {
                atoms.iter().find(|a| a.name == name).map(|a| a.weight.clone()).unwrap_or_else(Rational::zero)
            }
            _ => Rational::zero(),
        }
    }

    /// The empty set in this factor's representation.
    pub fn empty(&self) -> GeneratorSet {
        match self {
            FactorSpace::Discrete(_) => GeneratorSet::Atoms(BTreeSet::new()),
            _ => GeneratorSet::Intervals(Vec::new()),
        }
    }

    /// Total mass of the factor.
    pub fn total(&self) -> Extended {
        self.measure(&GeneratorSet::Full).expect("full set is always valid")
    }

    /// Validates `s` against this factor and puts it in canonical form.
    pub fn canonicalize(&self, s: &GeneratorSet) -> Result<GeneratorSet> {
        match (self, s) {
            (_, GeneratorSet::Full) => Ok(GeneratorSet::Full),
            (FactorSpace::Discrete(_), GeneratorSet::Atoms(names)) => {
                let all = self.atom_names();
                if let Some(bad) = names.iter().find(|n| !all.contains(*n)) {
                    return Err(Error::domain(format!("atom {bad} is not in the factor")));
                }
                if *names == all {
                    Ok(GeneratorSet::Full)
                } else {
                    Ok(s.clone())
                }
            }
            (FactorSpace::Discrete(_), GeneratorSet::Intervals(v)) if v.is_empty() => Ok(self.empty()),
            (FactorSpace::Discrete(_), GeneratorSet::Intervals(_)) => {
                Err(Error::domain("interval set used on a discrete factor"))
            }
            (_, GeneratorSet::Atoms(a)) if a.is_empty() => Ok(self.empty()),
            (_, GeneratorSet::Atoms(_)) => Err(Error::domain("atom set used on an interval factor")),
            (_, GeneratorSet::Intervals(v)) => {
                let universe = self.universe().expect("interval factor");
                for iv in v {
                    if !iv.is_valid() {
                        return Err(Error::domain(format!("interval {iv} is empty or malformed")));
                    }
                    if iv.lo < universe.lo || iv.hi > universe.hi {
                        return Err(Error::domain(format!("interval {iv} leaves {}", universe)));
                    }
                }
                let merged = merge(v.clone());
                if merged.len() == 1 && merged[0] == universe {
                    Ok(GeneratorSet::Full)
                } else {
                    Ok(GeneratorSet::Intervals(merged))
                }
            }
        }
    }

    /// Interval-list view of a canonical set on an interval factor.
    fn intervals_of(&self, s: &GeneratorSet) -> Result<Vec<Interval>> {
        match s {
            GeneratorSet::Full => Ok(vec![self.universe().ok_or_else(|| Error::domain("not an interval factor"))?]),
            GeneratorSet::Intervals(v) => Ok(v.clone()),
            GeneratorSet::Atoms(a) if a.is_empty() => Ok(Vec::new()),
            GeneratorSet::Atoms(_) => Err(Error::domain("atom set used on an interval factor")),
        }
    }

    fn atoms_of(&self, s: &GeneratorSet) -> Result<BTreeSet<String>> {
        match s {
            GeneratorSet::Full => Ok(self.atom_names()),
            GeneratorSet::Atoms(a) => Ok(a.clone()),
            GeneratorSet::Intervals(v) if v.is_empty() => Ok(BTreeSet::new()),
            GeneratorSet::Intervals(_) => Err(Error::domain("interval set used on a discrete factor")),
        }
    }

    /// Public view of a set as sorted disjoint intervals (interval factors only).
    pub fn as_intervals(&self, s: &GeneratorSet) -> Result<Vec<Interval>> {
        let s = self.canonicalize(s)?;
        self.intervals_of(&s)
    }

    /// Public view of a set as atom names (discrete factors only).
    pub fn as_atoms(&self, s: &GeneratorSet) -> Result<BTreeSet<String>> {
        let s = self.canonicalize(s)?;
        self.atoms_of(&s)
    }

    fn from_intervals(&self, v: Vec<Interval>) -> GeneratorSet {
        self.canonicalize(&GeneratorSet::Intervals(merge(v))).expect("derived from valid sets")
    }

    fn from_atoms(&self, a: BTreeSet<String>) -> GeneratorSet {
        self.canonicalize(&GeneratorSet::Atoms(a)).expect("derived from valid sets")
    }

    pub fn measure(&self, s: &GeneratorSet) -> Result<Extended> {
        let s = self.canonicalize(s)?;
        match self {
            FactorSpace::Discrete(_) => {
                let mut total = Rational::zero();
                for name in self.atoms_of(&s)? {
                    total += self.weight(&name);
                }
                Ok(Extended::Finite(total))
            }
            _ => {
                let mut total = Extended::zero();
                for iv in self.intervals_of(&s)? {
                    total = total + iv.length();
                }
                Ok(total)
            }
        }
    }

    pub fn intersect(&self, a: &GeneratorSet, b: &GeneratorSet) -> Result<GeneratorSet> {
        let (a, b) = (self.canonicalize(a)?, self.canonicalize(b)?);
        if a == GeneratorSet::Full {
            return Ok(b);
        }
        if b == GeneratorSet::Full {
            return Ok(a);
        }
        match self {
            FactorSpace::Discrete(_) => {
                Ok(self.from_atoms(self.atoms_of(&a)?.intersection(&self.atoms_of(&b)?).cloned().collect()))
            }
            _ => Ok(self.from_intervals(intersect_lists(&self.intervals_of(&a)?, &self.intervals_of(&b)?))),
        }
    }

    /// `Omega \ s`.
    pub fn complement(&self, s: &GeneratorSet) -> Result<GeneratorSet> {
        let s = self.canonicalize(s)?;
        match self {
            FactorSpace::Discrete(_) => {
                let inside = self.atoms_of(&s)?;
                Ok(self.from_atoms(self.atom_names().difference(&inside).cloned().collect()))
            }
            _ => {
                let universe = self.universe().expect("interval factor");
                Ok(self.from_intervals(complement_list(&self.intervals_of(&s)?, &universe)))
            }
        }
    }

    /// `ambient \ s`.
    pub fn complement_within(&self, s: &GeneratorSet, ambient: &GeneratorSet) -> Result<GeneratorSet> {
        self.intersect(&self.complement(s)?, ambient)
    }

    pub fn difference(&self, a: &GeneratorSet, b: &GeneratorSet) -> Result<GeneratorSet> {
        self.complement_within(b, a)
    }

    pub fn union(&self, a: &GeneratorSet, b: &GeneratorSet) -> Result<GeneratorSet> {
        let (a, b) = (self.canonicalize(a)?, self.canonicalize(b)?);
        if a == GeneratorSet::Full || b == GeneratorSet::Full {
            return Ok(GeneratorSet::Full);
        }
        match self {
            FactorSpace::Discrete(_) => {
                Ok(self.from_atoms(self.atoms_of(&a)?.union(&self.atoms_of(&b)?).cloned().collect()))
            }
            _ => {
                let mut v = self.intervals_of(&a)?;
                v.extend(self.intervals_of(&b)?);
                Ok(self.from_intervals(v))
            }
        }
    }

    /// Union of two sets that must not overlap.
    pub fn union_disjoint(&self, a: &GeneratorSet, b: &GeneratorSet) -> Result<GeneratorSet> {
        let common = self.intersect(a, b)?;
        if !self.is_empty(&common)? {
            return Err(Error::precondition(format!("sets overlap on {common}")));
        }
        self.union(a, b)
    }

    pub fn is_empty(&self, s: &GeneratorSet) -> Result<bool> {
        Ok(match self.canonicalize(s)? {
            GeneratorSet::Full => match self {
                FactorSpace::Discrete(atoms) => atoms.is_empty(),
                _ => false,
            },
            GeneratorSet::Intervals(v) => v.is_empty(),
            GeneratorSet::Atoms(a) => a.is_empty(),
        })
    }

    pub fn is_subset(&self, a: &GeneratorSet, b: &GeneratorSet) -> Result<bool> {
        let rest = self.difference(a, b)?;
        self.is_empty(&rest)
    }

    pub fn is_disjoint(&self, a: &GeneratorSet, b: &GeneratorSet) -> Result<bool> {
        let common = self.intersect(a, b)?;
        self.is_empty(&common)
    }

    /// Shifts every interval by `shift`; only defined on the line.
    pub fn translate(&self, s: &GeneratorSet, shift: &Rational) -> Result<GeneratorSet> {
        if !self.is_line() {
            return Err(Error::unsupported(format!("translation on a {} factor", self.kind_name())));
        }
        let s = self.canonicalize(s)?;
        match s {
            GeneratorSet::Full => Ok(GeneratorSet::Full),
            other => {
                let moved = self
                    .intervals_of(&other)?
                    .into_iter()
                    .map(|iv| Interval { lo: iv.lo.shifted(shift), hi: iv.hi.shifted(shift) })
                    .collect();
                Ok(self.from_intervals(moved))
            }
        }
    }

    /// Common refinement of `sets`: the nonempty pieces of their union, each
    /// tagged with the sorted indices of the sets containing it. Pieces with
    /// the same membership are merged; output is ordered by piece.
    pub fn partition(&self, sets: &[GeneratorSet]) -> Result<Vec<(GeneratorSet, Vec<usize>)>> {
        let sets = sets.iter().map(|s| self.canonicalize(s)).collect::<Result<Vec<_>>>()?;
        let mut groups: BTreeMap<Vec<usize>, GeneratorSet> = BTreeMap::new();
        match self {
            FactorSpace::Discrete(atoms) => {
                let members: Vec<BTreeSet<String>> = sets.iter().map(|s| self.atoms_of(s)).collect::<Result<_>>()?;
                for atom in atoms {
                    let inside: Vec<usize> =
                        members.iter().enumerate().filter(|(_, m)| m.contains(&atom.name)).map(|(k, _)| k).collect();
                    if inside.is_empty() {
                        continue;
                    }
                    let piece = GeneratorSet::atoms([atom.name.clone()]);
                    let merged = match groups.remove(&inside) {
                        Some(prev) => self.union(&prev, &piece)?,
                        None => piece,
                    };
                    groups.insert(inside, merged);
                }
            }
            _ => {
                let lists: Vec<Vec<Interval>> = sets.iter().map(|s| self.intervals_of(s)).collect::<Result<_>>()?;
                let mut cuts: Vec<Bound> = lists.iter().flatten().flat_map(|iv| [iv.lo.clone(), iv.hi.clone()]).collect();
                cuts.sort();
                cuts.dedup();
                let mut covering: Vec<Vec<usize>> = vec![Vec::new(); cuts.len().saturating_sub(1)];
                for (k, l) in lists.iter().enumerate() {
                    for iv in l {
                        let a = cuts.binary_search(&iv.lo).expect("endpoint is a cut");
                        let b = cuts.binary_search(&iv.hi).expect("endpoint is a cut");
                        for c in &mut covering[a..b] {
                            c.push(k);
                        }
                    }
                }
                for (w, inside) in cuts.windows(2).zip(covering) {
                    if inside.is_empty() {
                        continue;
                    }
                    let piece = Interval { lo: w[0].clone(), hi: w[1].clone() };
                    let merged = match groups.remove(&inside) {
                        Some(GeneratorSet::Intervals(mut v)) => {
                            v.push(piece);
                            GeneratorSet::Intervals(merge(v))
                        }
                        _ => GeneratorSet::Intervals(vec![piece]),
                    };
                    groups.insert(inside, merged);
                }
            }
        }
        let mut out: Vec<(GeneratorSet, Vec<usize>)> = groups
            .into_iter()
            .map(|(m, s)| self.canonicalize(&s).map(|s| (s, m)))
            .collect::<Result<_>>()?;
        out.sort();
        Ok(out)
    }

    /// The set with null atoms removed; used to compare sets almost everywhere.
    pub fn essential(&self, s: &GeneratorSet) -> Result<GeneratorSet> {
        let s = self.canonicalize(s)?;
        match self {
            FactorSpace::Discrete(_) => {
                let kept = self.atoms_of(&s)?.into_iter().filter(|n| !self.weight(n).is_zero()).collect();
                Ok(self.from_atoms(kept))
            }
            _ => Ok(s),
        }
    }

    /// Some point of a nonempty set.
    pub fn sample_point(&self, s: &GeneratorSet) -> Result<Option<Coord>> {
        let s = self.canonicalize(s)?;
        Ok(match self {
            FactorSpace::Discrete(_) => self.atoms_of(&s)?.into_iter().next().map(Coord::Atom),
            _ => self.intervals_of(&s)?.first().map(|iv| {
                Coord::Real(match (&iv.lo, &iv.hi) {
                    (Bound::Finite(a), _) => a.clone(),
                    (Bound::NegInf, Bound::Finite(b)) => b - Rational::one(),
                    _ => Rational::zero(),
                })
            }),
        })
    }

    pub fn contains(&self, s: &GeneratorSet, x: &Coord) -> Result<bool> {
        let s = self.canonicalize(s)?;
        match (self, x) {
            (FactorSpace::Discrete(_), Coord::Atom(name)) => {
                if !self.atom_names().contains(name) {
                    return Err(Error::domain(format!("atom {name} is not in the factor")));
                }
                Ok(self.atoms_of(&s)?.contains(name))
            }
            (FactorSpace::Discrete(_), Coord::Real(_)) => Err(Error::domain("real coordinate on a discrete factor")),
            (_, Coord::Atom(_)) => Err(Error::domain("atom coordinate on an interval factor")),
            (_, Coord::Real(q)) => {
                let universe = self.universe().expect("interval factor");
                if !universe.contains_point(q) {
                    return Err(Error::domain(format!("coordinate {q} outside {universe}")));
                }
                Ok(self.intervals_of(&s)?.iter().any(|iv| iv.contains_point(q)))
            }
        }
    }
}

/// A single coordinate value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Real(Rational),
    Atom(String),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Real(q) => write!(f, "{q}"),
            Coord::Atom(a) => f.write_str(a),
        }
    }
}

/// A sequence of factors: an explicit prefix followed by one repeated factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorSequence {
    pub prefix: Vec<FactorSpace>,
    pub tail: FactorSpace,
}

impl FactorSequence {
    pub fn uniform(factor: FactorSpace) -> Self {
        FactorSequence { prefix: Vec::new(), tail: factor }
    }

    /// Factor at the 1-based coordinate `i`.
    pub fn factor(&self, i: usize) -> &FactorSpace {
        assert!(i >= 1, "coordinates are 1-based");
        self.prefix.get(i - 1).unwrap_or(&self.tail)
    }

    pub fn all_line(&self) -> bool {
        self.tail.is_line() && self.prefix.iter().all(FactorSpace::is_line)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use proptest::prelude::*;

    fn iv(a: Rational, b: Rational) -> GeneratorSet {
        GeneratorSet::interval(a, b)
    }

    fn ab() -> FactorSpace {
        FactorSpace::discrete([("a", int(1)), ("b", int(1))]).unwrap()
    }

    #[test]
    fn measures_of_basic_sets() {
        let u = FactorSpace::UnitInterval;
        assert_eq!(u.measure(&iv(int(0), rat(1, 2))).unwrap(), Extended::Finite(rat(1, 2)));
        assert_eq!(FactorSpace::Line.measure(&GeneratorSet::Full).unwrap(), Extended::Infinite);
        assert_eq!(u.measure(&GeneratorSet::Full).unwrap(), Extended::one());
        assert_eq!(ab().measure(&GeneratorSet::atoms(["a"])).unwrap(), Extended::one());
    }

    #[test]
    fn intersection_and_complement() {
        let u = FactorSpace::UnitInterval;
        let s = u.intersect(&iv(int(0), rat(1, 2)), &iv(rat(1, 4), rat(3, 4))).unwrap();
        assert_eq!(s, iv(rat(1, 4), rat(1, 2)));
        let c = u.complement_within(&iv(int(0), rat(1, 2)), &GeneratorSet::Full).unwrap();
        assert_eq!(c, iv(rat(1, 2), int(1)));
        let t = iv(rat(1, 8), rat(3, 8));
        assert_eq!(u.intersect(&t, &GeneratorSet::Full).unwrap(), t);
    }

    #[test]
    fn overlapping_disjoint_union_is_rejected() {
        let u = FactorSpace::UnitInterval;
        assert!(u.union_disjoint(&iv(int(0), rat(1, 2)), &iv(rat(1, 4), int(1))).is_err());
        let joined = u.union_disjoint(&iv(int(0), rat(1, 2)), &iv(rat(1, 2), int(1))).unwrap();
        assert_eq!(joined, GeneratorSet::Full);
    }

    #[test]
    fn translation_examples() {
        let l = FactorSpace::Line;
        assert_eq!(l.translate(&iv(int(0), int(1)), &int(1)).unwrap(), iv(int(1), int(2)));
        let s = GeneratorSet::Intervals(vec![Interval::new(int(0), rat(1, 2)), Interval::new(rat(3, 4), int(1))]);
        let expect =
            GeneratorSet::Intervals(vec![Interval::new(rat(-1, 4), rat(1, 4)), Interval::new(rat(1, 2), rat(3, 4))]);
        assert_eq!(l.translate(&s, &rat(-1, 4)).unwrap(), expect);
        assert_eq!(l.translate(&s, &int(0)).unwrap(), l.canonicalize(&s).unwrap());
        assert!(FactorSpace::UnitInterval.translate(&s, &int(1)).is_err());
    }

    #[test]
    fn line_complement_uses_infinite_ends() {
        let l = FactorSpace::Line;
        let c = l.complement(&iv(int(0), int(1))).unwrap();
        assert_eq!(l.measure(&c).unwrap(), Extended::Infinite);
        assert_eq!(l.union(&c, &iv(int(0), int(1))).unwrap(), GeneratorSet::Full);
    }

    #[test]
    fn domain_errors() {
        let u = FactorSpace::UnitInterval;
        assert_eq!(u.measure(&iv(int(0), int(2))).unwrap_err().kind(), crate::ErrorKind::DomainMismatch);
        assert!(u.measure(&GeneratorSet::atoms(["a"])).is_err());
        assert!(ab().measure(&GeneratorSet::atoms(["z"])).is_err());
    }

    #[test]
    fn essential_drops_null_atoms() {
        let f = FactorSpace::discrete([("a", int(1)), ("z", int(0))]).unwrap();
        assert_eq!(f.essential(&GeneratorSet::Full).unwrap(), GeneratorSet::atoms(["a"]));
    }

    #[test]
    fn partition_of_overlapping_intervals() {
        let u = FactorSpace::UnitInterval;
        let parts = u.partition(&[iv(int(0), rat(1, 2)), iv(rat(1, 4), int(1))]).unwrap();
        assert_eq!(
            parts,
            vec![
                (iv(int(0), rat(1, 4)), vec![0]),
                (iv(rat(1, 4), rat(1, 2)), vec![0, 1]),
                (iv(rat(1, 2), int(1)), vec![1]),
            ]
        );
        let parts = ab().partition(&[GeneratorSet::Full, GeneratorSet::atoms(["b"])]).unwrap();
        assert_eq!(parts, vec![(GeneratorSet::atoms(["a"]), vec![0]), (GeneratorSet::atoms(["b"]), vec![0, 1])]);
    }

    fn unit_set() -> impl Strategy<Value = GeneratorSet> {
        proptest::collection::vec((0i64..16, 1i64..6), 0..5).prop_map(|pairs| {
            let v = pairs
                .into_iter()
                .map(|(a, len)| Interval::new(rat(a, 16), rat((a + len).min(16), 16)))
                .filter(|iv| iv.lo < iv.hi)
                .collect();
            FactorSpace::UnitInterval.from_intervals(v)
        })
    }

    proptest! {
        #[test]
        fn inclusion_exclusion(a in unit_set(), b in unit_set()) {
            let u = FactorSpace::UnitInterval;
            let m = |s: &GeneratorSet| u.measure(s).unwrap().finite().unwrap().clone();
            let both = u.intersect(&a, &b).unwrap();
            let only = u.union(&u.difference(&a, &b).unwrap(), &u.difference(&b, &a).unwrap()).unwrap();
            let all = u.union(&a, &b).unwrap();
            prop_assert_eq!(m(&both) + m(&only), m(&all));
        }

        #[test]
        fn translation_preserves_measure(a in unit_set(), n in -50i64..50, d in 1i64..20) {
            let l = FactorSpace::Line;
            let t = l.translate(&a, &rat(n, d)).unwrap();
            prop_assert_eq!(l.measure(&t).unwrap(), l.measure(&a).unwrap());
        }

        #[test]
        fn canonicalization_idempotent(a in unit_set()) {
            let u = FactorSpace::UnitInterval;
            let once = u.canonicalize(&a).unwrap();
            prop_assert_eq!(u.canonicalize(&once).unwrap(), once);
        }

        #[test]
        fn complement_partitions(a in unit_set()) {
            let u = FactorSpace::UnitInterval;
            let c = u.complement(&a).unwrap();
            prop_assert!(u.is_disjoint(&a, &c).unwrap());
            prop_assert_eq!(u.union(&a, &c).unwrap(), GeneratorSet::Full);
        }
    }
}
