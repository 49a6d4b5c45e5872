//! Infinite products of nonnegative reals: exact partial products, certified
//! classification of the limit, and the plus product.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{exp_bounds, ln_bounds, RatInterval, DEFAULT_BITS};
use crate::numeric::{int, pow, Rational};

/// Built-in closed-form term families, indexed from `n = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `a_n = c`.
    Constant { value: Rational },
    /// `a_n = exp(s * r^n)`.
    GeometricLog { scale: Rational, ratio: Rational },
    /// `a_n = exp(s * (-1)^(n+1) / n)`.
    AlternatingHarmonicExp { scale: Rational },
    /// `a_n = 1 - r^n`.
    OneMinusGeometric { ratio: Rational },
}

/// A term given either as a rational or as `exp` of a rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Rational(Rational),
    Exp(Rational),
}

/// Enclosure rule for the tail sum `sum_{n>m} ln a_n` of a closed-form family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Certificate {
    /// `|tail| <= c * r^m`.
    Geometric { coefficient: Rational, ratio: Rational },
    /// `|tail| <= c / (m + 1)`.
    Harmonic { coefficient: Rational },
    /// Alternating tail with convex decreasing magnitudes: the tail lies between
    /// half the first omitted term and that plus half the first difference.
    AlternatingConvex,
}

/// A sequence `(a_n)_{n >= 1}` of nonnegative reals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SequenceRule {
    EventuallyConstant { prefix: Vec<Rational>, tail: Rational },
    Periodic { pattern: Vec<Rational> },
    /// Family terms `n + offset`; `offset` lets a rule describe a tail of another.
    ClosedForm { family: Family, certificate: Option<Certificate>, offset: usize },
}

/// `factor * e^exponent`, the exact value of a finite product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialProduct {
    pub factor: Rational,
    pub exponent: Rational,
}

impl PartialProduct {
    /// The value when it is rational (zero factor or zero exponent).
    pub fn as_rational(&self) -> Option<Rational> {
        if self.factor.is_zero() || self.exponent.is_zero() {
            Some(self.factor.clone())
        } else {
            None
        }
    }

    pub fn enclosure(&self, bits: u32) -> RatInterval {
        let (lo, hi) = exp_bounds(&self.exponent, bits);
        RatInterval::new(lo, hi).scale(&self.factor)
    }
}

/// Classified value of an infinite product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductValue {
    /// A positive rational.
    Exact(Rational),
    /// Certified bounds `0 < lo <= hi`.
    Interval(RatInterval),
    Zero,
    PlusInfinity,
    /// Partial products oscillate without a limit.
    Indeterminate,
}

impl ProductValue {
    /// Normalizes `0` to [`ProductValue::Zero`].
    pub fn exact(q: Rational) -> Self {
        if q.is_zero() {
            ProductValue::Zero
        } else {
            ProductValue::Exact(q)
        }
    }

    pub fn one() -> Self {
        ProductValue::Exact(Rational::one())
    }

    pub fn exact_value(&self) -> Option<Rational> {
        match self {
            ProductValue::Exact(q) => Some(q.clone()),
            ProductValue::Zero => Some(Rational::zero()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ProductValue::Exact(_) | ProductValue::Interval(_) | ProductValue::Zero)
    }

    /// Certified enclosure of a finite value.
    pub fn enclosure(&self) -> Option<RatInterval> {
        match self {
            ProductValue::Exact(q) => Some(RatInterval::point(q.clone())),
            ProductValue::Interval(iv) => Some(iv.clone()),
            ProductValue::Zero => Some(RatInterval::zero()),
            _ => None,
        }
    }

    pub fn upper(&self) -> Option<Rational> {
        self.enclosure().map(|iv| iv.hi)
    }

    fn from_interval(iv: RatInterval) -> Self {
        if iv.is_point() {
            ProductValue::exact(iv.lo)
        } else {
            ProductValue::Interval(iv)
        }
    }

    /// Product with the convention `0 * inf = 0`.
    pub fn mul(&self, other: &ProductValue) -> ProductValue {
        use ProductValue::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (PlusInfinity, _) | (_, PlusInfinity) => PlusInfinity,
            (Exact(a), Exact(b)) => Exact(a * b),
            _ => {
                let iv = self.enclosure().unwrap().mul(&other.enclosure().unwrap()).round_out(DEFAULT_BITS);
                ProductValue::from_interval(iv)
            }
        }
    }

    pub fn add(&self, other: &ProductValue) -> ProductValue {
        use ProductValue::*;
        match (self, other) {
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (PlusInfinity, _) | (_, PlusInfinity) => PlusInfinity,
            (Zero, x) | (x, Zero) => x.clone(),
            (Exact(a), Exact(b)) => Exact(a + b),
            _ => {
                let iv = self.enclosure().unwrap().add(&other.enclosure().unwrap()).round_out(DEFAULT_BITS);
                ProductValue::from_interval(iv)
            }
        }
    }

    pub fn scale(&self, k: &Rational) -> ProductValue {
        self.mul(&ProductValue::exact(k.clone()))
    }

    /// Certified comparison `self <= other`, `None` when enclosures overlap.
    pub fn certainly_le(&self, other: &ProductValue) -> Option<bool> {
        if let (Some(a), Some(b)) = (self.exact_value(), other.exact_value()) {
            return Some(a <= b);
        }
        match (self, other) {
            (_, ProductValue::PlusInfinity) if self.is_finite() => Some(true),
            (ProductValue::PlusInfinity, _) if other.is_finite() => Some(false),
            _ => {
                let (a, b) = (self.enclosure()?, other.enclosure()?);
                if a.hi <= b.lo {
                    Some(true)
                } else if a.lo > b.hi {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ProductValue::Exact(_) => "exact",
            ProductValue::Interval(_) => "interval",
            ProductValue::Zero => "zero",
            ProductValue::PlusInfinity => "infinite",
            ProductValue::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for ProductValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductValue::Exact(q) => write!(f, "{q}"),
            ProductValue::Interval(iv) => write!(f, "{iv}"),
            ProductValue::Zero => f.write_str("0"),
            ProductValue::PlusInfinity => f.write_str("inf"),
            ProductValue::Indeterminate => f.write_str("indeterminate"),
        }
    }
}

/// Default enclosure width for certified products.
pub fn default_precision() -> Rational {
    Rational::new(1.into(), 1_000_000_000.into())
}

/// Working precision in bits for a requested enclosure width.
pub(crate) fn bits_for(precision: &Rational) -> u32 {
    let scale = (precision.denom().bits() as i64 - precision.numer().bits() as i64).max(0) as u32;
    DEFAULT_BITS.max(scale + 64)
}

fn check_precision(precision: &Rational) -> Result<()> {
    if precision.is_positive() {
        Ok(())
    } else {
        Err(Error::precondition(format!("precision must be positive, got {precision}")))
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Constant { .. } => "constant",
            Family::GeometricLog { .. } => "geometric-log",
            Family::AlternatingHarmonicExp { .. } => "alternating-harmonic-exp",
            Family::OneMinusGeometric { .. } => "one-minus-geometric",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Family::Constant { value } if value.is_negative() => {
                Err(Error::precondition(format!("constant term {value} is negative")))
            }
            Family::GeometricLog { ratio, .. } if ratio.abs() >= Rational::one() => {
                Err(Error::precondition(format!("geometric-log ratio {ratio} must satisfy |r| < 1")))
            }
            Family::OneMinusGeometric { ratio } if !ratio.is_positive() || *ratio >= Rational::one() => {
                Err(Error::precondition(format!("one-minus-geometric ratio {ratio} must lie in (0, 1)")))
            }
            _ => Ok(()),
        }
    }

    pub fn term(&self, n: usize) -> Term {
        let nq = int(n as i64);
        match self {
            Family::Constant { value } => Term::Rational(value.clone()),
            Family::GeometricLog { scale, ratio } => Term::Exp(scale * pow(ratio, n as u64)),
            Family::AlternatingHarmonicExp { scale } => {
                let sign = if n % 2 == 1 { Rational::one() } else { -Rational::one() };
                Term::Exp(scale * sign / nq)
            }
            Family::OneMinusGeometric { ratio } => Term::Rational(Rational::one() - pow(ratio, n as u64)),
        }
    }

    /// A certificate that is valid for this family, if one exists.
    pub fn default_certificate(&self) -> Option<Certificate> {
        match self {
            Family::Constant { value } if value.is_one() => {
                Some(Certificate::Geometric { coefficient: Rational::zero(), ratio: Rational::zero() })
            }
            Family::Constant { .. } => None,
            Family::GeometricLog { scale, ratio } => {
                let r = ratio.abs();
                let c = scale.abs() * &r / (Rational::one() - &r);
                Some(Certificate::Geometric { coefficient: c, ratio: r })
            }
            Family::AlternatingHarmonicExp { .. } => Some(Certificate::AlternatingConvex),
            Family::OneMinusGeometric { ratio } => {
                let one_minus = Rational::one() - ratio;
                Some(Certificate::Geometric { coefficient: ratio / (&one_minus * &one_minus), ratio: ratio.clone() })
            }
        }
    }
}

impl Term {
    pub fn is_zero(&self) -> bool {
        matches!(self, Term::Rational(q) if q.is_zero())
    }

    /// Certified comparison of two term values.
    pub fn compare(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Rational(a), Term::Rational(b)) => a.cmp(b),
            (Term::Exp(a), Term::Exp(b)) => a.cmp(b),
            (Term::Rational(q), Term::Exp(x)) => compare_rational_exp(q, x),
            (Term::Exp(x), Term::Rational(q)) => compare_rational_exp(q, x).reverse(),
        }
    }

    /// Position relative to 1.
    pub fn cmp_one(&self) -> Ordering {
        match self {
            Term::Rational(q) => q.cmp(&Rational::one()),
            Term::Exp(x) => x.cmp(&Rational::zero()),
        }
    }

    /// Enclosure of `|ln a|`; `None` for a zero term.
    fn abs_log_lower(&self) -> Option<Rational> {
        match self {
            Term::Exp(x) => Some(x.abs()),
            Term::Rational(q) if q.is_zero() => None,
            Term::Rational(q) => {
                let (lo, hi) = ln_bounds(q, 64);
                Some(if lo.is_positive() {
                    lo
                } else if hi.is_negative() {
                    -hi
                } else {
                    Rational::zero()
                })
            }
        }
    }
}

/// Orders `q` against `e^x`. The two are never equal unless `x = 0`, `q = 1`.
fn compare_rational_exp(q: &Rational, x: &Rational) -> Ordering {
    if !q.is_positive() {
        return Ordering::Less;
    }
    if x.is_zero() {
        return q.cmp(&Rational::one());
    }
    let mut bits = 64;
    loop {
        let (lo, hi) = exp_bounds(x, bits);
        if *q < lo {
            return Ordering::Less;
        }
        if *q > hi {
            return Ordering::Greater;
        }
        bits *= 2;
        if bits > 1 << 16 {
            // Unreachable for rational inputs by transcendence of e^x.
            return q.cmp(&lo);
        }
    }
}

impl Certificate {
    fn validate(&self, family: &Family) -> Result<()> {
        match self {
            Certificate::Geometric { coefficient, ratio } => {
                if coefficient.is_negative() || ratio.is_negative() || *ratio >= Rational::one() {
                    return Err(Error::precondition(format!(
                        "geometric certificate needs c >= 0 and 0 <= r < 1, got c = {coefficient}, r = {ratio}"
                    )));
                }
            }
            Certificate::Harmonic { coefficient } => {
                if coefficient.is_negative() {
                    return Err(Error::precondition("harmonic certificate coefficient is negative"));
                }
            }
            Certificate::AlternatingConvex => {
                if !matches!(family, Family::AlternatingHarmonicExp { .. }) {
                    return Err(Error::precondition(format!(
                        "alternating certificate does not apply to the {} family",
                        family.name()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Enclosure of `sum_{k > done} ln(family term k)`.
    fn tail_enclosure(&self, family: &Family, done: usize) -> RatInterval {
        let m = int(done as i64);
        match self {
            Certificate::Geometric { coefficient, ratio } => {
                let b = coefficient * pow(ratio, done as u64);
                RatInterval::new(-&b, b)
            }
            Certificate::Harmonic { coefficient } => {
                let b = coefficient / (m + Rational::one());
                RatInterval::new(-&b, b)
            }
            Certificate::AlternatingConvex => {
                let Family::AlternatingHarmonicExp { scale } = family else {
                    unreachable!("validated against the family")
                };
                let b0 = scale.abs() / int(done as i64 + 1);
                let b1 = scale.abs() / int(done as i64 + 2);
                let near = &b0 / int(2);
                let far = &near + (&b0 - &b1) / int(2);
                let first_positive = match family.term(done + 1) {
                    Term::Exp(x) => x.is_positive(),
                    Term::Rational(_) => unreachable!(),
                };
                if first_positive {
                    RatInterval::new(near, far)
                } else {
                    RatInterval::new(-far, -near)
                }
            }
        }
    }

    /// Necessary condition: the bound must dominate each single omitted term.
    fn sanity_check(&self, family: &Family, offset: usize) -> Result<()> {
        for done in offset..offset + 16 {
            let enclosure = self.tail_enclosure(family, done);
            let reach = core::cmp::max(enclosure.lo.abs(), enclosure.hi.abs());
            let bound = match self {
                Certificate::AlternatingConvex => continue,
                _ => reach,
            };
            if let Some(term_log) = family.term(done + 1).abs_log_lower() {
                if term_log > bound {
                    return Err(Error::precondition(format!(
                        "certificate bound {bound} at m = {} is below |ln a_{}|",
                        done - offset,
                        done - offset + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

fn lcm_all(lengths: impl IntoIterator<Item = usize>) -> usize {
    lengths.into_iter().fold(1, |acc, n| acc.lcm(&n))
}

impl SequenceRule {
    pub fn eventually(prefix: Vec<Rational>, tail: Rational) -> Result<Self> {
        let rule = SequenceRule::EventuallyConstant { prefix, tail };
        rule.validate()?;
        Ok(rule)
    }

    pub fn periodic(pattern: Vec<Rational>) -> Result<Self> {
        let rule = SequenceRule::Periodic { pattern };
        rule.validate()?;
        Ok(rule)
    }

    pub fn closed_form(family: Family, certificate: Option<Certificate>) -> Result<Self> {
        let rule = SequenceRule::ClosedForm { family, certificate, offset: 0 };
        rule.validate()?;
        Ok(rule)
    }

    /// Checks nonnegativity and family/certificate parameters.
    pub fn validate(&self) -> Result<()> {
        let negative = |v: &[Rational]| v.iter().position(Signed::is_negative);
        match self {
            SequenceRule::EventuallyConstant { prefix, tail } => {
                if let Some(i) = negative(prefix) {
                    return Err(Error::precondition(format!("a_{} = {} is negative", i + 1, prefix[i])));
                }
                if tail.is_negative() {
                    return Err(Error::precondition(format!("tail value {tail} is negative")));
                }
            }
            SequenceRule::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(Error::precondition("periodic pattern is empty"));
                }
                if let Some(i) = negative(pattern) {
                    return Err(Error::precondition(format!("a_{} = {} is negative", i + 1, pattern[i])));
                }
            }
            SequenceRule::ClosedForm { family, certificate, offset } => {
                family.validate()?;
                if let Some(c) = certificate {
                    c.validate(family)?;
                    c.sanity_check(family, *offset)?;
                }
            }
        }
        Ok(())
    }

    /// The 1-based term `a_n`.
    pub fn term(&self, n: usize) -> Term {
        assert!(n >= 1, "terms are 1-based");
        match self {
            SequenceRule::EventuallyConstant { prefix, tail } => {
                Term::Rational(prefix.get(n - 1).unwrap_or(tail).clone())
            }
            SequenceRule::Periodic { pattern } => Term::Rational(pattern[(n - 1) % pattern.len()].clone()),
            SequenceRule::ClosedForm { family, offset, .. } => family.term(n + offset),
        }
    }

    /// Rational value of `a_n` when the rule has rational terms.
    pub fn rational_term(&self, n: usize) -> Option<Rational> {
        match self.term(n) {
            Term::Rational(q) => Some(q),
            Term::Exp(x) if x.is_zero() => Some(Rational::one()),
            Term::Exp(_) => None,
        }
    }

    /// Whether every term is rational.
    pub fn has_rational_terms(&self) -> bool {
        match self {
            SequenceRule::ClosedForm { family, .. } => {
                matches!(family, Family::Constant { .. } | Family::OneMinusGeometric { .. })
            }
            _ => true,
        }
    }

    /// Supremum of the terms of a rational rule.
    pub fn rational_sup(&self) -> Option<Rational> {
        match self {
            SequenceRule::EventuallyConstant { prefix, tail } => prefix.iter().chain([tail]).max().cloned(),
            SequenceRule::Periodic { pattern } => pattern.iter().max().cloned(),
            SequenceRule::ClosedForm { family: Family::Constant { value }, .. } => Some(value.clone()),
            SequenceRule::ClosedForm { family: Family::OneMinusGeometric { .. }, .. } => Some(Rational::one()),
            SequenceRule::ClosedForm { .. } => None,
        }
    }

    /// Minimum of `a_n` over `n > m` for rational rules where it is attained.
    pub fn rational_inf_after(&self, m: usize) -> Option<Rational> {
        match self {
            SequenceRule::EventuallyConstant { prefix, tail } => prefix.iter().skip(m).chain([tail]).min().cloned(),
            SequenceRule::Periodic { pattern } => pattern.iter().min().cloned(),
            SequenceRule::ClosedForm { family: Family::Constant { value }, .. } => Some(value.clone()),
            // 1 - r^n increases with n.
            SequenceRule::ClosedForm { family: Family::OneMinusGeometric { .. }, .. } => self.rational_term(m + 1),
            SequenceRule::ClosedForm { .. } => None,
        }
    }

    /// The rule `n -> a_{n+m}`.
    pub fn tail_from(&self, m: usize) -> SequenceRule {
        match self {
            SequenceRule::EventuallyConstant { prefix, tail } => SequenceRule::EventuallyConstant {
                prefix: prefix.iter().skip(m).cloned().collect(),
                tail: tail.clone(),
            },
            SequenceRule::Periodic { pattern } => {
                let k = m % pattern.len();
                let mut rotated = pattern[k..].to_vec();
                rotated.extend_from_slice(&pattern[..k]);
                SequenceRule::Periodic { pattern: rotated }
            }
            SequenceRule::ClosedForm { family, certificate, offset } => {
                SequenceRule::ClosedForm { family: family.clone(), certificate: certificate.clone(), offset: offset + m }
            }
        }
    }

    /// First index `n > m` with `a_n = 0`, when decidable and present.
    pub fn first_zero_after(&self, m: usize) -> Option<usize> {
        match self {
            SequenceRule::EventuallyConstant { prefix, tail } => {
                (m + 1..=prefix.len()).find(|&n| prefix[n - 1].is_zero()).or_else(|| {
                    tail.is_zero().then(|| core::cmp::max(m + 1, prefix.len() + 1))
                })
            }
            SequenceRule::Periodic { pattern } => {
                (m + 1..=m + pattern.len()).find(|&n| pattern[(n - 1) % pattern.len()].is_zero())
            }
            SequenceRule::ClosedForm { family: Family::Constant { value }, .. } if value.is_zero() => Some(m + 1),
            SequenceRule::ClosedForm { .. } => None,
        }
    }

    /// Length after which the rule is purely periodic, and that period.
    fn eventual_period(&self) -> Option<(usize, usize)> {
        match self {
            SequenceRule::EventuallyConstant { prefix, .. } => Some((prefix.len(), 1)),
            SequenceRule::Periodic { pattern } => Some((0, pattern.len())),
            SequenceRule::ClosedForm { family: Family::Constant { .. }, .. } => Some((0, 1)),
            SequenceRule::ClosedForm { .. } => None,
        }
    }

    /// Exact `prod_{n=1}^{m} a_n` in the form `factor * e^exponent`.
    pub fn partial_product(&self, m: usize) -> PartialProduct {
        let mut factor = Rational::one();
        let mut exponent = Rational::zero();
        for n in 1..=m {
            match self.term(n) {
                Term::Rational(q) => factor *= q,
                Term::Exp(x) => exponent += x,
            }
            if factor.is_zero() {
                return PartialProduct { factor, exponent: Rational::zero() };
            }
        }
        PartialProduct { factor, exponent }
    }

    /// Classifies `prod_{n>=1} a_n`. Closed-form rules yield an enclosure of
    /// width at most `precision`.
    pub fn classify(&self, precision: &Rational) -> Result<ProductValue> {
        check_precision(precision)?;
        match self {
            SequenceRule::EventuallyConstant { prefix, tail } => Ok(classify_eventual(prefix, tail)),
            SequenceRule::Periodic { pattern } => Ok(classify_periodic(pattern)),
            SequenceRule::ClosedForm { family: Family::Constant { value }, .. } => {
                Ok(classify_eventual(&[], value))
            }
            SequenceRule::ClosedForm { family, certificate, offset } => {
                if let Family::GeometricLog { scale, ratio } = family {
                    if scale.is_zero() || ratio.is_zero() {
                        return Ok(ProductValue::one());
                    }
                }
                let Some(certificate) = certificate else {
                    return Err(Error::inconclusive(format!(
                        "closed-form {} rule has no convergence certificate",
                        family.name()
                    )));
                };
                classify_certified(family, certificate, *offset, precision)
            }
        }
    }

    /// The plus product: terms above 1 and the rest multiplied separately,
    /// then combined with `0 * inf = 0`.
    pub fn plus_product(&self, precision: &Rational) -> Result<PlusProduct> {
        check_precision(precision)?;
        let (above, below) = match self {
            SequenceRule::EventuallyConstant { prefix, tail } => split_eventual(prefix, tail),
            SequenceRule::Periodic { pattern } => {
                let has = |o: Ordering| pattern.iter().any(|a| a.cmp(&Rational::one()) == o);
                let above = if has(Ordering::Greater) { ProductValue::PlusInfinity } else { ProductValue::one() };
                let below = if pattern.iter().any(Zero::is_zero) || has(Ordering::Less) {
                    ProductValue::Zero
                } else {
                    ProductValue::one()
                };
                (above, below)
            }
            SequenceRule::ClosedForm { family, certificate, offset } => match family {
                Family::Constant { value } => split_eventual(&[], value),
                Family::GeometricLog { scale, ratio } => split_geometric_log(scale, ratio, *offset),
                Family::AlternatingHarmonicExp { scale } => {
                    if scale.is_zero() {
                        (ProductValue::one(), ProductValue::one())
                    } else {
                        (ProductValue::PlusInfinity, ProductValue::Zero)
                    }
                }
                Family::OneMinusGeometric { .. } => {
                    let certificate = certificate.clone().or_else(|| family.default_certificate());
                    let rule = SequenceRule::ClosedForm { family: family.clone(), certificate, offset: *offset };
                    (ProductValue::one(), rule.classify(precision)?)
                }
            },
        };
        let value = above.mul(&below);
        Ok(PlusProduct { above, below, value })
    }
}

/// Parts of a plus product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusProduct {
    /// Product over `{n : a_n > 1}`.
    pub above: ProductValue,
    /// Product over `{n : a_n <= 1}`.
    pub below: ProductValue,
    pub value: ProductValue,
}

fn classify_eventual(prefix: &[Rational], tail: &Rational) -> ProductValue {
    if prefix.iter().any(Zero::is_zero) || tail.is_zero() {
        return ProductValue::Zero;
    }
    match tail.cmp(&Rational::one()) {
        Ordering::Greater => ProductValue::PlusInfinity,
        Ordering::Less => ProductValue::Zero,
        Ordering::Equal => ProductValue::exact(prefix.iter().fold(Rational::one(), |acc, a| acc * a)),
    }
}

fn classify_periodic(pattern: &[Rational]) -> ProductValue {
    let block = pattern.iter().fold(Rational::one(), |acc, a| acc * a);
    match block.cmp(&Rational::one()) {
        _ if block.is_zero() => ProductValue::Zero,
        Ordering::Greater => ProductValue::PlusInfinity,
        Ordering::Less => ProductValue::Zero,
        Ordering::Equal if pattern.iter().all(One::is_one) => ProductValue::one(),
        Ordering::Equal => ProductValue::Indeterminate,
    }
}

fn split_eventual(prefix: &[Rational], tail: &Rational) -> (ProductValue, ProductValue) {
    let one = Rational::one();
    let mut above = prefix.iter().filter(|a| **a > one).fold(one.clone(), |acc, a| acc * a);
    let mut below = prefix.iter().filter(|a| **a <= one).fold(one.clone(), |acc, a| acc * a);
    let (mut above_inf, mut below_zero) = (false, false);
    match tail.cmp(&one) {
        Ordering::Greater => above_inf = true,
        Ordering::Less => below_zero = true,
        Ordering::Equal => {}
    }
    if below.is_zero() {
        below_zero = true;
    }
    let above = if above_inf { ProductValue::PlusInfinity } else { ProductValue::exact(core::mem::take(&mut above)) };
    let below = if below_zero { ProductValue::Zero } else { ProductValue::exact(core::mem::take(&mut below)) };
    (above, below)
}

fn exp_value(x: &Rational) -> ProductValue {
    if x.is_zero() {
        return ProductValue::one();
    }
    let (lo, hi) = exp_bounds(x, DEFAULT_BITS);
    ProductValue::Interval(RatInterval::new(lo, hi))
}

/// Sums of `s r^k` over even and odd `k > offset`, returned as (positive, negative) parts.
fn split_geometric_log(scale: &Rational, ratio: &Rational, offset: usize) -> (ProductValue, ProductValue) {
    if scale.is_zero() || ratio.is_zero() {
        return (ProductValue::one(), ProductValue::one());
    }
    let one = Rational::one();
    let (pos, neg) = if ratio.is_positive() {
        let total = scale * pow(ratio, offset as u64 + 1) / (&one - ratio);
        if total.is_positive() {
            (total, Rational::zero())
        } else {
            (Rational::zero(), total)
        }
    } else {
        let r2 = ratio * ratio;
        let first_even = if (offset + 1) % 2 == 0 { offset + 1 } else { offset + 2 };
        let first_odd = if (offset + 1) % 2 == 1 { offset + 1 } else { offset + 2 };
        let even = scale * pow(ratio, first_even as u64) / (&one - &r2);
        let odd = scale * pow(ratio, first_odd as u64) / (&one - &r2);
        if even.is_positive() {
            (even, odd)
        } else {
            (odd, even)
        }
    };
    (exp_value(&pos), exp_value(&neg))
}

const CERTIFIED_TERM_CAP: usize = 1 << 22;

fn classify_certified(
    family: &Family,
    certificate: &Certificate,
    offset: usize,
    precision: &Rational,
) -> Result<ProductValue> {
    let bits = bits_for(precision);
    let mut factor = RatInterval::point(Rational::one());
    let mut exponent = RatInterval::zero();
    let mut done = 0usize;
    let mut target = 16usize;
    loop {
        while done < target {
            done += 1;
            match family.term(done + offset) {
                Term::Rational(q) if q.is_zero() => return Ok(ProductValue::Zero),
                Term::Rational(q) => factor = factor.scale(&q).round_out(bits),
                Term::Exp(x) => exponent = exponent.add(&RatInterval::point(x)).round_out(bits),
            }
        }
        let total = exponent.add(&certificate.tail_enclosure(family, done + offset));
        let value = total.exp(bits).mul(&factor).round_out(bits);
        if value.width() <= *precision && value.lo.is_positive() {
            return Ok(ProductValue::Interval(value));
        }
        if target >= CERTIFIED_TERM_CAP {
            return Err(Error::inconclusive(format!(
                "certificate did not reach width {precision} within {CERTIFIED_TERM_CAP} terms"
            )));
        }
        target *= 2;
    }
}

/// Result of comparing `prod a_n` against a dominating finite `prod b_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bounded {
    /// Certified value of `prod a_n`, clipped to the upper bound.
    Value(ProductValue),
    /// `prod a_n` could not be classified; only the bound is certified.
    AtMost(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: Bounded,
    pub rhs: ProductValue,
    /// Number of leading terms on which `a_n <= b_n` was verified.
    pub checked_terms: usize,
    /// Whether the check covers every index.
    pub exhaustive: bool,
}

const COMPARE_HORIZON: usize = 64;

/// Bounds `prod a_n` by `prod b_n` given `a_n <= b_n` termwise.
pub fn compare_products(a: &SequenceRule, b: &SequenceRule, precision: &Rational) -> Result<Comparison> {
    check_precision(precision)?;
    let (horizon, exhaustive) = match (a.eventual_period(), b.eventual_period()) {
        (Some((pa, qa)), Some((pb, qb))) => (pa.max(pb) + lcm_all([qa, qb]), true),
        _ => (COMPARE_HORIZON, false),
    };
    let mut zero_seen = false;
    for n in 1..=horizon {
        let (x, y) = (a.term(n), b.term(n));
        if x.compare(&y) == Ordering::Greater {
            return Err(Error::precondition(format!("a_{n} > b_{n}, so the first sequence is not dominated")));
        }
        zero_seen |= x.is_zero();
    }
    if zero_seen {
        let rhs = b.classify(precision).unwrap_or(ProductValue::Indeterminate);
        return Ok(Comparison { lhs: Bounded::Value(ProductValue::Zero), rhs, checked_terms: horizon, exhaustive });
    }
    let rhs = b.classify(precision)?;
    let Some(upper) = rhs.upper() else {
        return Err(Error::precondition(format!("prod b_n is not certified finite ({})", rhs.kind_name())));
    };
    let lhs = if rhs == ProductValue::Zero {
        Bounded::Value(ProductValue::Zero)
    } else {
        match a.classify(precision) {
            Ok(ProductValue::Interval(iv)) => {
                let hi = if iv.hi > upper { upper.clone() } else { iv.hi.clone() };
                Bounded::Value(ProductValue::from_interval(RatInterval::new(iv.lo, hi)))
            }
            Ok(ProductValue::PlusInfinity) => {
                return Err(Error::precondition("prod a_n diverges, so a_n <= b_n fails beyond the checked terms"))
            }
            Ok(ProductValue::Indeterminate) | Err(_) => Bounded::AtMost(upper),
            Ok(value) => Bounded::Value(value),
        }
    };
    Ok(Comparison { lhs, rhs, checked_terms: horizon, exhaustive })
}

/// Termwise product of two eventually periodic rational rules.
pub fn pointwise_product(a: &SequenceRule, b: &SequenceRule) -> Option<SequenceRule> {
    let ((pa, qa), (pb, qb)) = (a.eventual_period()?, b.eventual_period()?);
    let start = pa.max(pb);
    let period = lcm_all([qa, qb]);
    let value = |n: usize| -> Option<Rational> { Some(a.rational_term(n)? * b.rational_term(n)?) };
    let prefix: Option<Vec<Rational>> = (1..=start).map(value).collect();
    let block: Option<Vec<Rational>> = (start + 1..=start + period).map(value).collect();
    let (prefix, block) = (prefix?, block?);
    if period == 1 {
        return Some(SequenceRule::EventuallyConstant { prefix, tail: block[0].clone() });
    }
    if start == 0 {
        return Some(SequenceRule::Periodic { pattern: block });
    }
    None
}

/// `ln` of a positive rational as an interval, exposed for oracles and tests.
pub fn ln_enclosure(x: &Rational) -> RatInterval {
    let (lo, hi) = ln_bounds(x, DEFAULT_BITS);
    RatInterval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use alloc::vec;
    use proptest::prelude::*;

    fn prec() -> Rational {
        rat(1, 1_000_000_000)
    }

    fn alt_harmonic() -> SequenceRule {
        SequenceRule::closed_form(
            Family::AlternatingHarmonicExp { scale: int(1) },
            Some(Certificate::AlternatingConvex),
        )
        .unwrap()
    }

    #[test]
    fn partial_product_examples() {
        let r = SequenceRule::eventually(vec![rat(1, 2); 3], int(1)).unwrap();
        assert_eq!(r.partial_product(5).as_rational(), Some(rat(1, 8)));
        assert_eq!(alt_harmonic().partial_product(0).as_rational(), Some(int(1)));
        let osc = SequenceRule::periodic(vec![int(2), rat(1, 2)]).unwrap();
        assert_eq!(osc.partial_product(3).as_rational(), Some(int(2)));
    }

    #[test]
    fn oscillating_sequence_is_indeterminate_but_plus_product_is_zero() {
        let osc = SequenceRule::periodic(vec![rat(1, 2), int(2)]).unwrap();
        assert_eq!(osc.classify(&prec()).unwrap(), ProductValue::Indeterminate);
        let plus = osc.plus_product(&prec()).unwrap();
        assert_eq!(plus.above, ProductValue::PlusInfinity);
        assert_eq!(plus.below, ProductValue::Zero);
        assert_eq!(plus.value, ProductValue::Zero);
    }

    #[test]
    fn all_ones() {
        let ones = SequenceRule::eventually(Vec::new(), int(1)).unwrap();
        assert_eq!(ones.classify(&prec()).unwrap(), ProductValue::one());
        assert_eq!(ones.plus_product(&prec()).unwrap().value, ProductValue::one());
    }

    #[test]
    fn eventually_constant_rules() {
        let up = SequenceRule::eventually(vec![int(1)], rat(3, 2)).unwrap();
        assert_eq!(up.classify(&prec()).unwrap(), ProductValue::PlusInfinity);
        let down = SequenceRule::eventually(vec![int(5)], rat(1, 2)).unwrap();
        assert_eq!(down.classify(&prec()).unwrap(), ProductValue::Zero);
        let zero = SequenceRule::eventually(vec![int(0)], int(3)).unwrap();
        assert_eq!(zero.classify(&prec()).unwrap(), ProductValue::Zero);
    }

    #[test]
    fn alternating_harmonic_exp_classical_and_plus() {
        let r = alt_harmonic();
        let ProductValue::Interval(iv) = r.classify(&prec()).unwrap() else { panic!("expected interval") };
        assert!(iv.contains(&int(2)));
        assert!(iv.width() <= prec());
        assert_eq!(r.plus_product(&prec()).unwrap().value, ProductValue::Zero);
    }

    #[test]
    fn missing_certificate_is_inconclusive() {
        let r = SequenceRule::closed_form(Family::AlternatingHarmonicExp { scale: int(1) }, None).unwrap();
        assert_eq!(r.classify(&prec()).unwrap_err().kind(), crate::ErrorKind::Inconclusive);
    }

    #[test]
    fn wrong_certificate_rejected() {
        let fam = Family::GeometricLog { scale: int(1), ratio: rat(1, 2) };
        let bad = Certificate::Geometric { coefficient: rat(1, 100), ratio: rat(1, 2) };
        assert!(SequenceRule::closed_form(fam.clone(), Some(bad)).is_err());
        assert!(SequenceRule::closed_form(fam, Some(Certificate::AlternatingConvex)).is_err());
    }

    #[test]
    fn geometric_log_contains_closed_form() {
        // sum_{n>=1} (1/2)^n = 1, so the product is e.
        let fam = Family::GeometricLog { scale: int(1), ratio: rat(1, 2) };
        let r = SequenceRule::closed_form(fam.clone(), fam.default_certificate()).unwrap();
        let ProductValue::Interval(iv) = r.classify(&prec()).unwrap() else { panic!() };
        let (lo, hi) = exp_bounds(&int(1), 128);
        assert!(iv.contains_interval(&RatInterval::new(lo, hi)));
    }

    #[test]
    fn compare_one_minus_geometric_with_ones() {
        let fam = Family::OneMinusGeometric { ratio: rat(1, 2) };
        let a = SequenceRule::closed_form(fam.clone(), fam.default_certificate()).unwrap();
        let b = SequenceRule::eventually(Vec::new(), int(1)).unwrap();
        let cmp = compare_products(&a, &b, &prec()).unwrap();
        let Bounded::Value(ProductValue::Interval(iv)) = cmp.lhs else { panic!("expected interval") };
        assert!(iv.lo.is_positive() && iv.hi <= int(1));
        // prod (1 - 2^-n) = 0.288788095...
        assert!(iv.lo < rat(28879, 100000) && iv.hi > rat(28878, 100000));
    }

    #[test]
    fn compare_rejects_violations_with_index() {
        let a = SequenceRule::eventually(vec![int(1), int(3)], int(1)).unwrap();
        let b = SequenceRule::eventually(Vec::new(), int(2)).unwrap();
        let err = compare_products(&a, &b, &prec()).unwrap_err();
        assert!(err.message().contains("a_2"));
    }

    #[test]
    fn compare_zero_term_and_identity() {
        let a = SequenceRule::eventually(vec![int(0)], rat(1, 2)).unwrap();
        let b = SequenceRule::eventually(vec![int(7)], int(1)).unwrap();
        assert_eq!(compare_products(&a, &b, &prec()).unwrap().lhs, Bounded::Value(ProductValue::Zero));
        let same = compare_products(&b, &b, &prec()).unwrap();
        assert_eq!(same.lhs, Bounded::Value(same.rhs.clone()));
    }

    #[test]
    fn compare_rational_against_exp() {
        assert_eq!(Term::Rational(int(2)).compare(&Term::Exp(int(1))), Ordering::Less);
        assert_eq!(Term::Rational(int(3)).compare(&Term::Exp(int(1))), Ordering::Greater);
        assert_eq!(Term::Rational(int(1)).compare(&Term::Exp(int(0))), Ordering::Equal);
    }

    #[test]
    fn tail_from_shifts_terms() {
        let r = SequenceRule::periodic(vec![int(1), int(2), int(3)]).unwrap();
        let t = r.tail_from(4);
        for n in 1..10 {
            assert_eq!(t.term(n), r.term(n + 4));
        }
        let c = alt_harmonic().tail_from(3);
        assert_eq!(c.term(1), alt_harmonic().term(4));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (0i64..8, 1i64..5).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn at_most_one_never_infinite(prefix in proptest::collection::vec((0i64..4, 4i64..8), 0..6),
                                       tail in (0i64..4, 4i64..8)) {
            let prefix = prefix.into_iter().map(|(n, d)| rat(n, d)).collect();
            let r = SequenceRule::eventually(prefix, rat(tail.0, tail.1)).unwrap();
            prop_assert_ne!(r.classify(&prec()).unwrap(), ProductValue::PlusInfinity);
            for m in 0..6 {
                let a = r.partial_product(m).as_rational().unwrap();
                let b = r.partial_product(m + 1).as_rational().unwrap();
                prop_assert!(b <= a);
            }
        }

        #[test]
        fn plus_agrees_when_above_part_finite(s in -6i64..6, r in -3i64..4) {
            let fam = Family::GeometricLog { scale: rat(s, 2), ratio: rat(r, 4) };
            let rule = SequenceRule::closed_form(fam.clone(), fam.default_certificate()).unwrap();
            let classical = rule.classify(&prec()).unwrap();
            let plus = rule.plus_product(&prec()).unwrap().value;
            let (a, b) = (classical.enclosure().unwrap(), plus.enclosure().unwrap());
            prop_assert!(a.overlaps(&b));
        }

        #[test]
        fn classification_splits_over_products(pa in proptest::collection::vec(small_rational(), 0..4), ta in small_rational(),
                                               pb in proptest::collection::vec(small_rational(), 0..4), tb in small_rational()) {
            let a = SequenceRule::eventually(pa, ta).unwrap();
            let b = SequenceRule::eventually(pb, tb).unwrap();
            let ab = pointwise_product(&a, &b).unwrap();
            let (va, vb) = (a.classify(&prec()).unwrap(), b.classify(&prec()).unwrap());
            if let (Some(x), Some(y)) = (va.exact_value(), vb.exact_value()) {
                prop_assert_eq!(ab.classify(&prec()).unwrap().exact_value(), Some(x * y));
            }
        }

        #[test]
        fn geometric_certified_interval_contains_value(s in -8i64..8, num in 1i64..4) {
            let ratio = rat(num, 4);
            let fam = Family::GeometricLog { scale: rat(s, 3), ratio: ratio.clone() };
            let rule = SequenceRule::closed_form(fam.clone(), fam.default_certificate()).unwrap();
            let exact_log = rat(s, 3) * &ratio / (Rational::one() - &ratio);
            let (lo, hi) = exp_bounds(&exact_log, 160);
            let value = rule.classify(&rat(1, 1_000_000)).unwrap().enclosure().unwrap();
            prop_assert!(value.contains_interval(&RatInterval::new(lo, hi)));
        }
    }
}
