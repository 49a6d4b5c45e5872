//! Outward-rounded rational enclosures and certified elementary functions.
//!
//! Bounds are dyadic rationals rounded to a relative precision in bits, so
//! denominators stay small while every enclosure remains rigorous.

use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numeric::{int, pow, rat, Rational};

/// Working precision (significant bits) used when callers have no target.
pub const DEFAULT_BITS: u32 = 128;

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

fn magnitude(x: &Rational) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

/// `floor(x * 2^shift)`.
fn scaled_floor(x: &Rational, shift: i64) -> BigInt {
    if shift >= 0 {
        (x.numer() << shift as usize).div_floor(x.denom())
    } else {
        x.numer().div_floor(&(x.denom() << (-shift) as usize))
    }
}

fn unscale(k: BigInt, shift: i64) -> Rational {
    if shift >= 0 {
        Rational::new(k, BigInt::one() << shift as usize)
    } else {
        Rational::from_integer(k << (-shift) as usize)
    }
}

/// Largest dyadic with `bits` significant bits that is `<= x`.
pub fn round_down(x: &Rational, bits: u32) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    if x.denom().is_one() || x.denom().bits() <= bits as u64 && x.numer().bits() <= 2 * bits as u64 {
        return x.clone();
    }
    let shift = bits as i64 - magnitude(x);
    unscale(scaled_floor(x, shift), shift)
}

/// Smallest dyadic with `bits` significant bits that is `>= x`.
pub fn round_up(x: &Rational, bits: u32) -> Rational {
    -round_down(&-x, bits)
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn round_out(&self, bits: u32) -> Self {
        RatInterval { lo: round_down(&self.lo, bits), hi: round_up(&self.hi, bits) }
    }

    pub fn add(&self, other: &RatInterval) -> Self {
        RatInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn neg(&self) -> Self {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_negative() {
            RatInterval { lo: &self.hi * k, hi: &self.lo * k }
        } else {
            RatInterval { lo: &self.lo * k, hi: &self.hi * k }
        }
    }

    pub fn mul(&self, other: &RatInterval) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        RatInterval { lo, hi }
    }

    pub fn intersect(&self, other: &RatInterval) -> Option<Self> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        (lo <= hi).then(|| RatInterval { lo: lo.clone(), hi: hi.clone() })
    }

    /// Enclosure of `exp` over the interval.
    pub fn exp(&self, bits: u32) -> Self {
        RatInterval { lo: exp_bounds(&self.lo, bits).0, hi: exp_bounds(&self.hi, bits).1 }
    }

    /// Enclosure of `ln` over a strictly positive interval.
    pub fn ln(&self, bits: u32) -> Self {
        RatInterval { lo: ln_bounds(&self.lo, bits).0, hi: ln_bounds(&self.hi, bits).1 }
    }

    /// Enclosure of `x^p` for `x >= 0` and rational `p > 0`.
    pub fn powf(&self, p: &Rational, bits: u32) -> Self {
        let edge = |x: &Rational, upper: bool| -> Rational {
            if x.is_zero() {
                return Rational::zero();
            }
            let (l, h) = ln_bounds(x, bits + 16);
            if upper {
                exp_bounds(&(h * p), bits).1
            } else {
                exp_bounds(&(l * p), bits).0
            }
        };
        RatInterval { lo: edge(&self.lo, false), hi: edge(&self.hi, true) }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Rigorous lower and upper bounds of `e^x`.
pub fn exp_bounds(x: &Rational, bits: u32) -> (Rational, Rational) {
    if x.is_zero() {
        return (Rational::one(), Rational::one());
    }
    // Reduce to |y| <= 1/2, evaluate the series, square back up.
    let k = (magnitude(x) + 2).max(0) as u32;
    let y = x / Rational::from_integer(BigInt::one() << k as usize);
    let p = bits + k + 24;
    let threshold = Rational::new(BigInt::one(), BigInt::one() << (p as usize + 4));

    let mut term = RatInterval::point(Rational::one());
    let mut sum = RatInterval::point(Rational::one());
    let mut j: i64 = 1;
    loop {
        term = term.scale(&y).scale(&rat(1, j)).round_out(p);
        sum = sum.add(&term).round_out(p);
        let size = if term.lo.abs() > term.hi.abs() { term.lo.abs() } else { term.hi.abs() };
        if size < threshold {
            // Tail of the series is at most twice the next term when |y| <= 1/2.
            let slack = size * int(2);
            sum = RatInterval { lo: round_down(&(&sum.lo - &slack), p), hi: round_up(&(&sum.hi + &slack), p) };
            break;
        }
        j += 1;
    }
    let mut lo = sum.lo;
    let mut hi = sum.hi;
    for _ in 0..k {
        lo = round_down(&(&lo * &lo), p);
        hi = round_up(&(&hi * &hi), p);
    }
    if lo.is_negative() {
        lo = Rational::zero();
    }
    (round_down(&lo, bits), round_up(&hi, bits))
}

/// Bounds of `atanh(z)` for `0 <= z <= 1/3`.
fn atanh_bounds(z: &Rational, bits: u32) -> (Rational, Rational) {
    if z.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let z2 = z * z;
    let z2_lo = round_down(&z2, bits);
    let z2_hi = round_up(&z2, bits);
    let mut pow_lo = round_down(z, bits);
    let mut pow_hi = round_up(z, bits);
    let mut sum_lo = Rational::zero();
    let mut sum_hi = Rational::zero();
    let mut j: i64 = 0;
    loop {
        let d = int(2 * j + 1);
        let t_lo = round_down(&(&pow_lo / &d), bits);
        let t_hi = round_up(&(&pow_hi / &d), bits);
        sum_lo = round_down(&(&sum_lo + &t_lo), bits);
        sum_hi = round_up(&(&sum_hi + &t_hi), bits);
        pow_lo = round_down(&(&pow_lo * &z2_lo), bits);
        pow_hi = round_up(&(&pow_hi * &z2_hi), bits);
        let small = Rational::new(BigInt::one(), BigInt::one() << (bits as usize + 8));
        if t_hi <= &sum_lo * &small {
            // Remaining terms are dominated by a geometric series with ratio 1/9.
            let rest = &pow_hi / int(2 * j + 3) * rat(9, 8);
            sum_hi = round_up(&(&sum_hi + rest), bits);
            break;
        }
        j += 1;
    }
    (sum_lo, sum_hi)
}

/// Rigorous lower and upper bounds of `ln x` for `x > 0`.
pub fn ln_bounds(x: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(x.is_positive(), "logarithm of a nonpositive number");
    if x.is_one() {
        return (Rational::zero(), Rational::zero());
    }
    let mut k = magnitude(x);
    let two_k = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(BigInt::one() << k as usize)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-k) as usize)
        }
    };
    let mut m = x / two_k(k);
    while m < Rational::one() {
        k -= 1;
        m = x / two_k(k);
    }
    while m >= int(2) {
        k += 1;
        m = x / two_k(k);
    }
    let extra = 64 - (k.unsigned_abs().leading_zeros());
    let p = bits + 16 + extra;
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let (a_lo, a_hi) = atanh_bounds(&z, p);
    let (l2_lo, l2_hi) = atanh_bounds(&rat(1, 3), p);
    let kq = int(k);
    let two = int(2);
    let (lo, hi) = if k >= 0 {
        (&kq * &l2_lo * &two + &a_lo * &two, &kq * &l2_hi * &two + &a_hi * &two)
    } else {
        (&kq * &l2_hi * &two + &a_lo * &two, &kq * &l2_lo * &two + &a_hi * &two)
    };
    (round_down(&lo, bits), round_up(&hi, bits))
}

/// Exact `n`-th root of a nonnegative rational, if it is rational.
pub fn exact_root(x: &Rational, n: u32) -> Option<Rational> {
    if x.is_negative() || n == 0 {
        return None;
    }
    if n == 1 {
        return Some(x.clone());
    }
    let rn = x.numer().nth_root(n);
    let rd = x.denom().nth_root(n);
    if rn.pow(n) == *x.numer() && rd.pow(n) == *x.denom() {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// A real number known exactly or through a certified enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Real {
    Exact(Rational),
    Approx(RatInterval),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(Rational::zero())
    }

    pub fn enclosure(&self) -> RatInterval {
        match self {
            Real::Exact(q) => RatInterval::point(q.clone()),
            Real::Approx(iv) => iv.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    pub fn add(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            _ => Real::Approx(self.enclosure().add(&other.enclosure()).round_out(DEFAULT_BITS)),
        }
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            (Real::Exact(a), _) | (_, Real::Exact(a)) if a.is_zero() => Real::zero(),
            _ => Real::Approx(self.enclosure().mul(&other.enclosure()).round_out(DEFAULT_BITS)),
        }
    }

    /// Whether the value may equal `other`; exact when both are exact.
    pub fn compatible(&self, other: &Real) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            _ => self.enclosure().overlaps(&other.enclosure()),
        }
    }

    /// `self^p` for `self >= 0` and rational `p > 0`.
    pub fn powq(&self, p: &Rational) -> Real {
        match self {
            Real::Exact(x) => rational_power(x, p),
            Real::Approx(iv) => Real::Approx(iv.powf(p, DEFAULT_BITS)),
        }
    }

    /// `1 / self` for `self > 0`.
    pub fn recip(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.recip()),
            Real::Approx(iv) => {
                Real::Approx(RatInterval::new(iv.hi.recip(), iv.lo.recip()).round_out(DEFAULT_BITS))
            }
        }
    }

    /// `self^(1/p)` for `self >= 0` and rational `p > 0`.
    pub fn root(&self, p: &Rational) -> Real {
        self.powq(&p.recip())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::Approx(iv) => write!(f, "{iv}"),
        }
    }
}

/// `x^p` for rational `x >= 0`, `p > 0`; exact whenever the result is rational
/// and the exponent is small.
pub fn rational_power(x: &Rational, p: &Rational) -> Real {
    assert!(!x.is_negative() && p.is_positive());
    if x.is_zero() || x.is_one() {
        return Real::Exact(x.clone());
    }
    let (a, b) = (p.numer().to_u64(), p.denom().to_u32());
    if let (Some(a), Some(b)) = (a, b) {
        if a <= 256 {
            let raised = pow(x, a);
            if let Some(r) = exact_root(&raised, b) {
                return Real::Exact(r);
            }
        }
    }
    Real::Approx(RatInterval::point(x.clone()).powf(p, DEFAULT_BITS))
}
