//! A translation-invariant measure on a sequence space carried by a scaled
//! coordinate basis `x_n = s_n e_n`, `x_n^* = s_n^{-1} e_n^*`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::factor::{FactorSequence, FactorSpace, GeneratorSet};
use crate::interval::{rational_power, Real};
use crate::lp::LpNorm;
use crate::numeric::{pow, rat, Rational};
use crate::product::ProductValue;
use crate::rectangle::{refine, Rectangle, Shift, TailSpec};
use crate::rn::{CubeBreakdown, RnFunction};
use crate::simple::{CylinderSimpleFunction, SimpleTerm};

/// Scaling rule `n -> s_n` with a summable certificate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scaling {
    /// `s_n = r^n` with `0 < r < 1`.
    Geometric { ratio: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MBasisSpec {
    /// Name of the ambient sequence space, for reports.
    pub label: String,
    pub scaling: Scaling,
}

impl MBasisSpec {
    pub fn geometric(label: impl Into<String>, ratio: Rational) -> Result<Self> {
        let spec = MBasisSpec { label: label.into(), scaling: Scaling::Geometric { ratio } };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.scaling {
            Scaling::Geometric { ratio } if ratio.is_positive() && *ratio < Rational::one() => Ok(()),
            Scaling::Geometric { ratio } => Err(Error::precondition(format!("scaling ratio {ratio} must lie in (0, 1)"))),
        }
    }

    /// `s_n`, 1-based.
    pub fn scale(&self, n: usize) -> Rational {
        match &self.scaling {
            Scaling::Geometric { ratio } => pow(ratio, n as u64),
        }
    }

    /// `sum_n s_n`.
    pub fn scale_sum(&self) -> Rational {
        match &self.scaling {
            Scaling::Geometric { ratio } => ratio / (Rational::one() - ratio),
        }
    }

    /// Coordinates `x_n^*(v) = v_n / s_n` of a finitely supported vector
    /// given in the canonical basis.
    pub fn coordinates(&self, v: &[Rational]) -> Vec<Rational> {
        v.iter().enumerate().map(|(i, x)| x / self.scale(i + 1)).collect()
    }

    /// Canonical-basis vector with the given basis coordinates.
    pub fn vector(&self, coords: &[Rational]) -> Vec<Rational> {
        coords.iter().enumerate().map(|(i, t)| t * self.scale(i + 1)).collect()
    }
}

/// `{x : x_n^*(x) in C_n for n <= m, x_n^*(x) in [t, t+1) for n > m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateRectangle {
    pub head: Vec<GeneratorSet>,
    pub tail_offset: Rational,
}

fn line_factors() -> Arc<FactorSequence> {
    Arc::new(FactorSequence::uniform(FactorSpace::Line))
}

impl CoordinateRectangle {
    pub fn new(head: Vec<GeneratorSet>, tail_offset: Rational) -> Result<Self> {
        for (i, s) in head.iter().enumerate() {
            let bounded = FactorSpace::Line.as_intervals(s)?.iter().all(|iv| iv.is_bounded());
            if !bounded {
                return Err(Error::unsupported(format!("coordinate {} constraint {s} is unbounded", i + 1)));
            }
        }
        Ok(CoordinateRectangle { head, tail_offset })
    }

    /// The centered unit cube `|x_n^*(x)| <= 1/2`, half-open.
    pub fn cube() -> Self {
        CoordinateRectangle { head: Vec::new(), tail_offset: rat(-1, 2) }
    }

    pub fn tail_set(&self) -> GeneratorSet {
        GeneratorSet::unit_from(&self.tail_offset)
    }

    /// Image under `x -> (x_n^*(x))_n`.
    pub fn image(&self) -> Result<Rectangle> {
        Rectangle::new(line_factors(), self.head.clone(), TailSpec::Unit(self.tail_set()))
    }

    /// Head sets padded with tail sets to length `len`.
    pub fn head_to(&self, len: usize) -> Vec<GeneratorSet> {
        let mut head = self.head.clone();
        head.extend((head.len()..len).map(|_| self.tail_set()));
        head
    }

    /// `mu_X(B) = lambda(image(B))`.
    pub fn mu_x(&self) -> Result<Rational> {
        match self.image()?.vol()? {
            ProductValue::Exact(q) => Ok(q),
            ProductValue::Zero => Ok(Rational::zero()),
            other => Err(Error::inconclusive(format!("measure of a coordinate rectangle came out as {other}"))),
        }
    }

    /// `B + v` for a finitely supported vector `v` in canonical coordinates.
    pub fn translate(&self, basis: &MBasisSpec, v: &[Rational]) -> Result<CoordinateRectangle> {
        let shift = Shift { head: basis.coordinates(v), tail: Rational::zero() };
        let moved = self.image()?.translated(&shift)?;
        CoordinateRectangle::new(moved.head().to_vec(), self.tail_offset.clone())
    }
}

/// `sum_k c_k chi_{B_k}` with coordinate rectangles sharing one tail offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XSimpleFunction {
    pub basis: MBasisSpec,
    pub terms: Vec<(Rational, CoordinateRectangle)>,
}

/// `int |f|^p dmu_X` computed three ways, plus the sum over the integer lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XIntegral {
    /// Over the atoms of the cells, measured with `mu_X`.
    pub direct: Real,
    /// Over the cubes of the lattice aligned with the tail sets.
    pub by_cubes: CubeBreakdown,
    /// Through the unit-cube decomposition.
    pub oplus: Real,
    /// Over the cubes `[a_n, a_n + 1)`.
    pub integer_lattice: Real,
}

impl XSimpleFunction {
    pub fn new(basis: MBasisSpec, terms: Vec<(Rational, CoordinateRectangle)>) -> Result<Self> {
        basis.validate()?;
        if let Some((_, first)) = terms.first() {
            if let Some((k, _)) = terms.iter().enumerate().find(|(_, (_, b))| b.tail_offset != first.tail_offset) {
                return Err(Error::unsupported(format!("term {k} uses a different tail offset")));
            }
        }
        Ok(XSimpleFunction { basis, terms })
    }

    pub fn tail_offset(&self) -> Rational {
        self.terms.first().map(|(_, b)| b.tail_offset.clone()).unwrap_or_else(|| rat(-1, 2))
    }

    fn level(&self) -> usize {
        self.terms.iter().map(|(_, b)| b.head.len()).max().unwrap_or(0)
    }

    /// The function read in coordinates, `(f o B^{-1}) chi_{B(X)}`.
    pub fn frak_e(&self) -> Result<RnFunction> {
        let level = self.level();
        let terms = self.terms.iter().map(|(c, b)| SimpleTerm { coeff: c.clone(), cell: b.head_to(level) }).collect();
        RnFunction::new(self.tail_offset(), CylinderSimpleFunction { level, terms })
    }

    /// `int |f|^p dmu_X` over the disjoint atoms of the cells.
    pub fn norm_pow(&self, p: &Rational) -> Result<Real> {
        if *p < Rational::one() {
            return Err(Error::precondition(format!("p = {p} must be at least 1")));
        }
        let images = self.terms.iter().map(|(_, b)| b.image()).collect::<Result<Vec<_>>>()?;
        let refinement = refine(&images)?;
        let mut total = Real::zero();
        for (atom, members) in refinement.atoms.iter().zip(&refinement.members) {
            let value: Rational = members.iter().map(|&k| &self.terms[k].0).sum();
            if value.is_zero() {
                continue;
            }
            let cell = CoordinateRectangle::new(atom.head().to_vec(), self.tail_offset())?;
            total = total.add(&rational_power(&value.abs(), p).mul(&Real::Exact(cell.mu_x()?)));
        }
        Ok(total)
    }

    pub fn lp_norm(&self, p: &Rational) -> Result<LpNorm> {
        let pth_power = self.norm_pow(p)?;
        Ok(LpNorm { p: p.clone(), norm: pth_power.root(p), pth_power })
    }

    pub fn integrate_on_x(&self, p: &Rational) -> Result<XIntegral> {
        let e = self.frak_e()?;
        Ok(XIntegral {
            direct: self.norm_pow(p)?,
            by_cubes: e.integral_by_cubes(p)?,
            oplus: e.frak_p()?.oplus_norm_pow(p)?,
            integer_lattice: e.integral_by_cubes_on_lattice(p, &Rational::zero())?.total,
        })
    }
}
