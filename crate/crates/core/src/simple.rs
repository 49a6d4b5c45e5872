//! Simple functions built from finitely many head cells, constant along the
//! remaining coordinates.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::factor::{Coord, FactorSpace, GeneratorSet};
use crate::numeric::{Extended, Rational};

/// A product of factors together with the set each coordinate is implicitly
/// restricted to beyond a function's level.
pub trait Frame {
    fn factor(&self, i: usize) -> &FactorSpace;
    fn implicit_set(&self, i: usize) -> GeneratorSet;

    /// Set that head cells at coordinate `i` must lie in.
    fn ambient_set(&self, i: usize) -> GeneratorSet {
        self.implicit_set(i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleTerm {
    pub coeff: Rational,
    /// One set per coordinate `1..=level`.
    pub cell: Vec<GeneratorSet>,
}

/// `sum_k c_k * chi(cell_k x implicit_{level+1} x implicit_{level+2} x ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderSimpleFunction {
    pub level: usize,
    pub terms: Vec<SimpleTerm>,
}

impl fmt::Display for CylinderSimpleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 @ level {}", self.level);
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*[", t.coeff)?;
            for (i, s) in t.cell.iter().enumerate() {
                if i > 0 {
                    f.write_str(" x ")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str("]")?;
        }
        write!(f, " @ level {}", self.level)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Leaf(Rational),
    Branch(Vec<(GeneratorSet, Node)>),
}

impl Node {
    fn is_zero(&self) -> bool {
        match self {
            Node::Leaf(c) => c.is_zero(),
            Node::Branch(children) => children.is_empty(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Overlaps {
    Reject,
    Sum,
}

struct Builder<'a, F: Frame> {
    frame: &'a F,
    terms: &'a [SimpleTerm],
    level: usize,
    mode: Overlaps,
}

impl<F: Frame> Builder<'_, F> {
    /// Section tree of the function restricted to the active terms: at each
    /// depth the coordinate is split into classes with equal sections.
    fn build(&self, depth: usize, active: &[usize]) -> Result<Node> {
        if depth == self.level {
            return match (self.mode, active) {
                (Overlaps::Reject, [a, b, ..]) => Err(Error::overlap(format!("terms {a} and {b} overlap"))),
                _ => Ok(Node::Leaf(active.iter().map(|&k| &self.terms[k].coeff).sum())),
            };
        }
        let factor = self.frame.factor(depth + 1);
        let sets: Vec<GeneratorSet> = active.iter().map(|&k| self.terms[k].cell[depth].clone()).collect();
        let mut classes: Vec<(GeneratorSet, Node)> = Vec::new();
        for (piece, members) in factor.partition(&sets)? {
            let piece = factor.essential(&piece)?;
            if factor.measure(&piece)?.is_zero() {
                continue;
            }
            let next: Vec<usize> = members.iter().map(|&m| active[m]).collect();
            let child = self.build(depth + 1, &next)?;
            if child.is_zero() {
                continue;
            }
            match classes.iter_mut().find(|(_, n)| *n == child) {
                Some((set, _)) => *set = factor.union(set, &piece)?,
                None => classes.push((piece, child)),
            }
        }
        classes.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Node::Branch(classes))
    }
}

/// Drops trailing coordinates along which the function equals the implicit set.
fn reduce<F: Frame>(frame: &F, node: Node, level: usize) -> Result<(Node, usize)> {
    let mut node = node;
    let mut level = level;
    while level > 0 {
        let implicit = frame.factor(level).essential(&frame.implicit_set(level))?;
        match strip_last(node.clone(), level - 1, &implicit) {
            Some(n) => {
                node = n;
                level -= 1;
            }
            None => break,
        }
    }
    Ok((node, level))
}

fn strip_last(node: Node, depth: usize, implicit: &GeneratorSet) -> Option<Node> {
    match node {
        Node::Leaf(_) => None,
        Node::Branch(children) if depth == 0 => match <[_; 1]>::try_from(children) {
            Ok([(set, leaf @ Node::Leaf(_))]) if set == *implicit => Some(leaf),
            Ok(_) => None,
            Err(v) if v.is_empty() => Some(Node::Branch(v)),
            Err(_) => None,
        },
        Node::Branch(children) => {
            let mut out = Vec::with_capacity(children.len());
            for (set, child) in children {
                out.push((set, strip_last(child, depth - 1, implicit)?));
            }
            Some(Node::Branch(out))
        }
    }
}

fn flatten(node: &Node, path: &mut Vec<GeneratorSet>, out: &mut Vec<SimpleTerm>) {
    match node {
        Node::Leaf(c) => {
            if !c.is_zero() {
                out.push(SimpleTerm { coeff: c.clone(), cell: path.clone() })
            }
        }
        Node::Branch(children) => {
            for (set, child) in children {
                path.push(set.clone());
                flatten(child, path, out);
                path.pop();
            }
        }
    }
}

impl CylinderSimpleFunction {
    pub fn zero(level: usize) -> Self {
        CylinderSimpleFunction { level, terms: Vec::new() }
    }

    /// The constant `c` on the whole frame.
    pub fn constant(c: Rational) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { alloc::vec![SimpleTerm { coeff: c, cell: Vec::new() }] };
        CylinderSimpleFunction { level: 0, terms }
    }

    pub fn new(level: usize, terms: Vec<(Rational, Vec<GeneratorSet>)>) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for (k, (coeff, cell)) in terms.into_iter().enumerate() {
            if cell.len() != level {
                return Err(Error::precondition(format!("term {k} has {} sets, expected {level}", cell.len())));
            }
            out.push(SimpleTerm { coeff, cell });
        }
        Ok(CylinderSimpleFunction { level, terms: out })
    }

    pub fn is_zero_repr(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_zero())
    }

    /// Checks that every cell lies inside the frame; returns the cells
    /// canonicalized.
    pub fn validated<F: Frame>(&self, frame: &F) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.iter().enumerate() {
            if t.cell.len() != self.level {
                return Err(Error::precondition(format!("term {k} has {} sets, expected {}", t.cell.len(), self.level)));
            }
            let mut cell = Vec::with_capacity(self.level);
            for (i, s) in t.cell.iter().enumerate() {
                let f = frame.factor(i + 1);
                let s = f.canonicalize(s).map_err(|e| Error::new(e.kind(), format!("term {k}: {}", e.message())))?;
                let ambient = frame.ambient_set(i + 1);
                if !f.is_subset(&s, &ambient)? {
                    return Err(Error::precondition(format!(
                        "term {k}: set {s} at coordinate {} leaves the ambient set {ambient}",
                        i + 1
                    )));
                }
                cell.push(s);
            }
            terms.push(SimpleTerm { coeff: t.coeff.clone(), cell });
        }
        Ok(CylinderSimpleFunction { level: self.level, terms })
    }

    fn canonical_with<F: Frame>(&self, frame: &F, mode: Overlaps) -> Result<Self> {
        let f = self.validated(frame)?;
        let active: Vec<usize> = (0..f.terms.len()).filter(|&k| !f.terms[k].coeff.is_zero()).collect();
        let builder = Builder { frame, terms: &f.terms, level: f.level, mode };
        let tree = builder.build(0, &active)?;
        let (tree, level) = reduce(frame, tree, f.level)?;
        let mut terms = Vec::new();
        flatten(&tree, &mut Vec::with_capacity(level), &mut terms);
        terms.sort();
        Ok(CylinderSimpleFunction { level, terms })
    }

    /// Unique representative of the almost-everywhere class: disjoint cells,
    /// no zero terms, smallest level. Overlapping cells are rejected.
    pub fn canonical<F: Frame>(&self, frame: &F) -> Result<Self> {
        self.canonical_with(frame, Overlaps::Reject)
    }

    /// Like [`Self::canonical`], but overlapping cells add up.
    pub fn canonical_sum<F: Frame>(&self, frame: &F) -> Result<Self> {
        self.canonical_with(frame, Overlaps::Sum)
    }

    /// Equality almost everywhere.
    pub fn equivalent<F: Frame>(&self, other: &Self, frame: &F) -> Result<bool> {
        Ok(self.canonical_sum(frame)? == other.canonical_sum(frame)?)
    }

    /// Same function written at level `m >= level`.
    pub fn embed<F: Frame>(&self, frame: &F, m: usize) -> Result<Self> {
        if m < self.level {
            return Err(Error::precondition(format!("cannot embed level {} into level {m}", self.level)));
        }
        let extra: Vec<GeneratorSet> = (self.level + 1..=m).map(|i| frame.implicit_set(i)).collect();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut cell = t.cell.clone();
                cell.extend(extra.iter().cloned());
                SimpleTerm { coeff: t.coeff.clone(), cell }
            })
            .collect();
        Ok(CylinderSimpleFunction { level: m, terms })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return CylinderSimpleFunction::zero(self.level);
        }
        let terms =
            self.terms.iter().map(|t| SimpleTerm { coeff: &t.coeff * k, cell: t.cell.clone() }).collect();
        CylinderSimpleFunction { level: self.level, terms }
    }

    /// Canonical sum.
    pub fn add<F: Frame>(&self, other: &Self, frame: &F) -> Result<Self> {
        let level = self.level.max(other.level);
        let mut joined = self.embed(frame, level)?;
        joined.terms.extend(other.embed(frame, level)?.terms);
        joined.canonical_sum(frame)
    }

    pub fn sub<F: Frame>(&self, other: &Self, frame: &F) -> Result<Self> {
        self.add(&other.scale(&-Rational::from_integer(1.into())), frame)
    }

    /// Value at a point of the frame given by its first coordinates.
    pub fn eval<F: Frame>(&self, frame: &F, x: &[Coord]) -> Result<Rational> {
        if x.len() < self.level {
            return Err(Error::precondition(format!("need {} coordinates, got {}", self.level, x.len())));
        }
        let mut total = Rational::zero();
        for t in &self.terms {
            let mut inside = true;
            for (i, s) in t.cell.iter().enumerate() {
                if !frame.factor(i + 1).contains(s, &x[i])? {
                    inside = false;
                    break;
                }
            }
            if inside {
                total += &t.coeff;
            }
        }
        Ok(total)
    }

    /// `sum_k w(|c_k|) * prod_i mu_i(cell_k,i)`, the level integral of `w(|f|)`
    /// on canonical (disjoint) cells.
    pub fn integrate_abs_with<F: Frame, W>(&self, frame: &F, w: W) -> Result<Extended>
    where
        W: Fn(&Rational) -> Rational,
    {
        let f = self.canonical_sum(frame)?;
        let mut total = Extended::zero();
        for t in &f.terms {
            let m = cell_measure(frame, &t.cell)?;
            total = total + Extended::Finite(w(&t.coeff.abs())) * m;
        }
        Ok(total)
    }

    /// Largest absolute coefficient.
    pub fn sup_abs(&self) -> Rational {
        self.terms.iter().map(|t| t.coeff.abs()).max().unwrap_or_else(Rational::zero)
    }
}

/// Product of the coordinate measures of a cell.
pub fn cell_measure<F: Frame>(frame: &F, cell: &[GeneratorSet]) -> Result<Extended> {
    let mut m = Extended::one();
    for (i, s) in cell.iter().enumerate() {
        m = m * frame.factor(i + 1).measure(s)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use alloc::vec;
    use proptest::prelude::*;

    struct Cube;

    impl Frame for Cube {
        fn factor(&self, _: usize) -> &FactorSpace {
            &FactorSpace::UnitInterval
        }
        fn implicit_set(&self, _: usize) -> GeneratorSet {
            GeneratorSet::Full
        }
    }

    fn iv(a: Rational, b: Rational) -> GeneratorSet {
        GeneratorSet::interval(a, b)
    }

    #[test]
    fn halves_merge_and_level_drops() {
        let f = CylinderSimpleFunction::new(
            2,
            vec![
                (int(3), vec![iv(int(0), rat(1, 2)), iv(int(0), rat(1, 2))]),
                (int(3), vec![iv(int(0), rat(1, 2)), iv(rat(1, 2), int(1))]),
                (int(3), vec![iv(rat(1, 2), int(1)), GeneratorSet::Full]),
            ],
        )
        .unwrap();
        assert_eq!(f.canonical(&Cube).unwrap(), CylinderSimpleFunction::constant(int(3)));
    }

    #[test]
    fn overlap_is_rejected_but_sums_allowed() {
        let f = CylinderSimpleFunction::new(
            1,
            vec![(int(1), vec![iv(int(0), rat(1, 2))]), (int(2), vec![iv(rat(1, 4), int(1))])],
        )
        .unwrap();
        assert_eq!(f.canonical(&Cube).unwrap_err().kind(), crate::ErrorKind::Overlap);
        let s = f.canonical_sum(&Cube).unwrap();
        assert_eq!(s.terms.len(), 3);
        assert_eq!(s.eval(&Cube, &[Coord::Real(rat(1, 3))]).unwrap(), int(3));
    }

    #[test]
    fn zero_function() {
        let f = CylinderSimpleFunction::new(2, vec![(int(0), vec![GeneratorSet::Full, GeneratorSet::Full])]).unwrap();
        assert_eq!(f.canonical(&Cube).unwrap(), CylinderSimpleFunction::zero(0));
    }

    fn dyadic() -> impl Strategy<Value = GeneratorSet> {
        (0i64..4, 1i64..5).prop_map(|(a, len)| iv(rat(a, 4), rat((a + len).min(4), 4)))
    }

    fn function() -> impl Strategy<Value = CylinderSimpleFunction> {
        (0usize..4).prop_flat_map(|level| {
            proptest::collection::vec((-3i64..4, proptest::collection::vec(dyadic(), level)), 0..4).prop_map(
                move |terms| {
                    CylinderSimpleFunction::new(level, terms.into_iter().map(|(c, cell)| (int(c), cell)).collect())
                        .unwrap()
                },
            )
        })
    }

    fn grid_point() -> impl Strategy<Value = Vec<Coord>> {
        proptest::collection::vec((0i64..8).prop_map(|k| Coord::Real(rat(2 * k + 1, 16))), 4)
    }

    proptest! {
        #[test]
        fn canonical_preserves_values(f in function(), x in grid_point()) {
            let c = f.canonical_sum(&Cube).unwrap();
            prop_assert_eq!(c.eval(&Cube, &x).unwrap(), f.eval(&Cube, &x).unwrap());
            prop_assert!(c.level <= f.level);
        }

        #[test]
        fn canonical_is_idempotent(f in function()) {
            let c = f.canonical_sum(&Cube).unwrap();
            prop_assert_eq!(c.canonical(&Cube).unwrap(), c.clone());
            let embedded = c.embed(&Cube, 5).unwrap();
            prop_assert_eq!(embedded.canonical(&Cube).unwrap(), c);
        }

        #[test]
        fn addition_is_pointwise(f in function(), g in function(), x in grid_point()) {
            let s = f.add(&g, &Cube).unwrap();
            prop_assert_eq!(s.eval(&Cube, &x).unwrap(), f.eval(&Cube, &x).unwrap() + g.eval(&Cube, &x).unwrap());
            prop_assert!(f.sub(&f, &Cube).unwrap().terms.is_empty());
        }
    }
}
