//! Exact arithmetic for real and imaginary quadratic orders.
//!
//! Continued fractions of quadratic irrationals, Hirzebruch sums, Dedekind
//! sums, class numbers, composition of classes and the 2-adic congruences
//! linking `h(−8p)` with Hirzebruch sums of `Q(√2p)`.

pub mod arith;
pub mod cfrac;
pub mod classgroup;
pub mod congruence;
pub mod dedekind;
pub mod error;
pub mod orders;

pub use error::{Error, Result};
