//! Premeasure on finite disjoint unions of rectangles, Carathéodory split
//! checks, cover-based upper bounds and translation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, ErrorKind, Result};
use crate::factor::{FactorSequence, GeneratorSet};
use crate::numeric::{int, Extended, Rational};
use crate::product::{ProductValue, SequenceRule};
use crate::rectangle::{RectUnion, Rectangle, Shift, TailSpec};

/// Tail classifications keyed by rule and head length.
type TailCache = BTreeMap<(SequenceRule, usize), ProductValue>;

/// Exact bookkeeping for sums of rectangle volumes.
///
/// Volumes whose tail product is only known through an enclosure are kept
/// symbolically as `coefficient * prod_{i > k} a_i`, so equal sums compare
/// equal without rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mass {
    finite: Extended,
    symbolic: BTreeMap<SequenceRule, (usize, Rational)>,
}

impl Default for Mass {
    fn default() -> Self {
        Mass { finite: Extended::zero(), symbolic: BTreeMap::new() }
    }
}

fn advance(rule: &SequenceRule, from: usize, to: usize, coefficient: &Rational) -> Rational {
    (from + 1..=to).fold(coefficient.clone(), |acc, i| acc * rule.rational_term(i).expect("rational rule"))
}

impl Mass {
    pub fn zero() -> Self {
        Mass::default()
    }

    /// Volume of one rectangle.
    pub fn of_rect(r: &Rectangle, precision: &Rational) -> Result<Self> {
        Self::of_rect_cached(r, precision, &mut TailCache::new())
    }

    fn of_rect_cached(r: &Rectangle, precision: &Rational, cache: &mut TailCache) -> Result<Self> {
        let mut mass = Mass::zero();
        if r.is_empty() {
            return Ok(mass);
        }
        let head = r.head_measure();
        if head.is_zero() {
            return Ok(mass);
        }
        let tail = match r.tail() {
            TailSpec::General { lengths, .. } => {
                let key = (lengths.clone(), r.head_len());
                match cache.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let v = r.tail_value(precision)?;
                        cache.insert(key, v.clone());
                        v
                    }
                }
            }
            _ => r.tail_value(precision)?,
        };
        match (tail, head) {
            (ProductValue::Indeterminate, _) => {
                return Err(Error::inconclusive(format!("volume of {r} is undefined")));
            }
            (ProductValue::Zero, _) => {}
            (_, Extended::Infinite) | (ProductValue::PlusInfinity, _) => mass.finite = Extended::Infinite,
            (ProductValue::Exact(q), Extended::Finite(h)) => mass.finite = Extended::Finite(h * q),
            (ProductValue::Interval(_), Extended::Finite(h)) => {
                let TailSpec::General { lengths, .. } = r.tail() else {
                    unreachable!("only general tails have enclosed volumes")
                };
                mass.symbolic.insert(lengths.clone(), (r.head_len(), h));
            }
        }
        Ok(mass)
    }

    pub fn add(&self, other: &Mass) -> Mass {
        let mut out = self.clone();
        out.finite = out.finite.clone() + other.finite.clone();
        for (rule, (k, c)) in &other.symbolic {
            let entry = match out.symbolic.get(rule) {
                None => (*k, c.clone()),
                Some((j, d)) => {
                    let m = (*j).max(*k);
                    (m, advance(rule, *j, m, d) + advance(rule, *k, m, c))
                }
            };
            out.symbolic.insert(rule.clone(), entry);
        }
        out
    }

    pub fn sum<'a>(rects: impl IntoIterator<Item = &'a Rectangle>, precision: &Rational) -> Result<Mass> {
        let mut total = Mass::zero();
        let mut cache = TailCache::new();
        for r in rects {
            total = total.add(&Mass::of_rect_cached(r, precision, &mut cache)?);
        }
        Ok(total)
    }

    pub fn is_infinite(&self) -> bool {
        self.finite.is_infinite()
    }

    /// Exact equality of the represented numbers.
    pub fn same_as(&self, other: &Mass) -> bool {
        if self.finite != other.finite {
            return false;
        }
        if self.is_infinite() {
            return true;
        }
        let keys = self.symbolic.keys().chain(other.symbolic.keys());
        keys.into_iter().all(|rule| match (self.symbolic.get(rule), other.symbolic.get(rule)) {
            (Some((j, c)), Some((k, d))) => {
                let m = (*j).max(*k);
                advance(rule, *j, m, c) == advance(rule, *k, m, d)
            }
            _ => false,
        })
    }

    /// Certified `self <= other`: exact when the symbolic parts compare
    /// termwise, otherwise by enclosures.
    pub fn certainly_le(&self, other: &Mass, precision: &Rational) -> Result<Option<bool>> {
        if other.is_infinite() {
            return Ok(Some(true));
        }
        let termwise = self.finite <= other.finite
            && self.symbolic.iter().all(|(rule, (j, c))| match other.symbolic.get(rule) {
                Some((k, d)) => {
                    let m = (*j).max(*k);
                    advance(rule, *j, m, c) <= advance(rule, *k, m, d)
                }
                None => false,
            });
        if termwise {
            return Ok(Some(true));
        }
        Ok(self.value(precision)?.certainly_le(&other.value(precision)?))
    }

    pub fn value(&self, precision: &Rational) -> Result<ProductValue> {
        let mut total = match &self.finite {
            Extended::Infinite => return Ok(ProductValue::PlusInfinity),
            Extended::Finite(q) => ProductValue::exact(q.clone()),
        };
        for (rule, (k, c)) in &self.symbolic {
            total = total.add(&rule.tail_from(*k).classify(precision)?.scale(c));
        }
        Ok(total)
    }
}

/// `sum_n vol(C_n)` over a validated disjoint union.
pub fn premeasure(u: &RectUnion, precision: &Rational) -> Result<ProductValue> {
    Mass::sum(u.members(), precision)?.value(precision)
}

/// Outcome of a Carathéodory split check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCheck {
    pub lhs: ProductValue,
    pub rhs_in: ProductValue,
    pub rhs_out: ProductValue,
    /// Exact equality `lhs = rhs_in + rhs_out`.
    pub equal: bool,
}

/// Measures `b`, `b ∩ c` and `b \ c` independently; `c` must be a cylinder.
pub fn split_check(b: &RectUnion, c: &Rectangle, precision: &Rational) -> Result<SplitCheck> {
    if !c.is_cylinder() {
        return Err(Error::precondition("split set must have a full tail"));
    }
    let whole = Mass::sum(b.members(), precision)?;
    if whole.is_infinite() {
        return Err(Error::precondition("split check needs a set of finite volume"));
    }
    let outside = c.complement_stream(c.head_len() + 1)?;
    debug_assert!(outside.exhausted);
    let mut inside_parts = Vec::new();
    let mut outside_parts = Vec::new();
    for m in b.members() {
        inside_parts.push(m.intersect(c)?);
        for t in &outside.terms {
            outside_parts.push(m.intersect(t)?);
        }
    }
    let inside = Mass::sum(&inside_parts, precision)?;
    let out = Mass::sum(&outside_parts, precision)?;
    Ok(SplitCheck {
        lhs: whole.value(precision)?,
        rhs_in: inside.value(precision)?,
        rhs_out: out.value(precision)?,
        equal: whole.same_as(&inside.add(&out)),
    })
}

/// First terms of a countable cover together with the set they cover.
#[derive(Clone, Debug)]
pub struct CoverPrefix {
    pub cover: Vec<Rectangle>,
    pub target: RectUnion,
}

/// Upper bound from a cover prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverBound {
    pub bound: ProductValue,
    pub exact: ProductValue,
    /// `bound - exact` when both are exact.
    pub slack: Option<Rational>,
}

/// Verifies that the cover contains the target, then bounds its measure.
pub fn subadditivity_bound(cp: &CoverPrefix, precision: &Rational) -> Result<CoverBound> {
    for member in cp.target.members() {
        let mut remaining = vec![member.clone()];
        for c in &cp.cover {
            let mut next = Vec::new();
            for r in remaining {
                if r.is_disjoint(c)? {
                    next.push(r);
                } else {
                    next.extend(r.difference(c)?);
                }
            }
            remaining = next;
            if remaining.is_empty() {
                break;
            }
        }
        if let Some(r) = remaining.first() {
            let witness = r.sample_point()?.map(|p| format!("{p}")).unwrap_or_else(|| format!("{r}"));
            return Err(Error::not_a_cover(format!("cover misses {witness}")));
        }
    }
    let bound = Mass::sum(&cp.cover, precision)?.value(precision)?;
    let exact = premeasure(&cp.target, precision)?;
    let slack = match (bound.exact_value(), exact.exact_value()) {
        (Some(b), Some(e)) => Some(b - e),
        _ => None,
    };
    Ok(CoverBound { bound, exact, slack })
}

/// Disjoint rectangles inside a container and their total volume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingCheck {
    pub sum: ProductValue,
    pub outer: ProductValue,
    pub holds: Option<bool>,
}

pub fn packing_check(inner: &[Rectangle], outer: &Rectangle, precision: &Rational) -> Result<PackingCheck> {
    let union = RectUnion::new(inner.to_vec())?;
    for (k, r) in union.members().iter().enumerate() {
        if !r.is_subset(outer)? {
            return Err(Error::precondition(format!("member {k} is not inside the container")));
        }
    }
    let sum = Mass::sum(union.members(), precision)?;
    let whole = Mass::of_rect(outer, precision)?;
    Ok(PackingCheck {
        sum: sum.value(precision)?,
        outer: whole.value(precision)?,
        holds: sum.certainly_le(&whole, precision)?,
    })
}

/// Coordinatewise translation; the volume is unchanged.
pub fn translate_rect(r: &Rectangle, shift: &Shift) -> Result<Rectangle> {
    r.translated(shift).map_err(|e| match e.kind() {
        ErrorKind::Unsupported => Error::domain(e.message()),
        _ => e,
    })
}

/// Largest supported `k` for [`binary_family`].
pub const MAX_BINARY_FAMILY: usize = 16;

/// The `2^k` rectangles with head sets `[0,1)` or `[1,2)` by bit string and
/// tail `[0,1)`: pairwise disjoint, each of volume 1.
pub fn binary_family(factors: Arc<FactorSequence>, k: usize) -> Result<Vec<Rectangle>> {
    if !factors.all_line() {
        return Err(Error::domain("binary family needs real-line factors"));
    }
    if k == 0 || k > MAX_BINARY_FAMILY {
        return Err(Error::precondition(format!("binary family size must be in 1..={MAX_BINARY_FAMILY}")));
    }
    let a = GeneratorSet::interval(Rational::zero(), Rational::one());
    let b = GeneratorSet::interval(Rational::one(), int(2));
    (0..1usize << k)
        .map(|bits| {
            let head = (0..k).map(|i| if bits >> (k - 1 - i) & 1 == 0 { a.clone() } else { b.clone() }).collect();
            Rectangle::new(factors.clone(), head, TailSpec::Unit(a.clone()))
        })
        .collect()
}
