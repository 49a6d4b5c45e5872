//! Exact countable product measures.
//!
//! Every quantity is either an exact rational or a certified rational
//! enclosure. Layers, bottom up:
//!
//! - [`factor`]: one-dimensional factors and their generator sets.
//! - [`product`]: infinite products of nonnegative reals, classical and plus.
//! - [`rectangle`]: cylinder and finite-volume rectangles, their volumes,
//!   intersections, complements and refinements.
//! - [`measure`]: premeasure on finite disjoint unions, split checks,
//!   cover bounds and translations.
//! - [`lp`]: cylinder simple functions on a finite-volume ambient product,
//!   partial integrals and the isometry with the limit space.
//! - [`rn`]: the product of Lebesgue measures on the real sequence space and
//!   its unit-cube direct-sum decomposition.
//! - [`banach`]: the measure induced on a sequence space through a scaled
//!   coordinate basis.
#![no_std]

extern crate alloc;

pub mod banach;
pub mod error;
pub mod factor;
pub mod interval;
pub mod lp;
pub mod measure;
pub mod numeric;
pub mod product;
pub mod rectangle;
pub mod rn;
pub mod simple;

pub use error::{Error, ErrorKind, Result};
pub use numeric::{Extended, Rational};
