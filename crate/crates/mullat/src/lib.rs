//! Exact multiplicative-lattice toolkit.
//!
//! The crate has four layers:
//!
//! * [`epmod`] — modules over ℤ (or ℤ with a chosen prime inverted),
//!   represented as saturated integer lattices with canonical Hermite bases;
//!   purity, simplicity, saturation indices, and quotient bases.
//! * [`multfield`] — multiplicative arithmetic in rational function fields:
//!   factored elements, exponent lattices, and hulls modulo constants.
//! * [`kummer`] — radical/twist bookkeeping over a division-closed system:
//!   Kummer-group invariants, determination constants, realizable twists.
//! * [`puiseux`] — truncated fractional-exponent series, Newton-polygon
//!   root solving, and descent of roots along monomial substitutions.
//!
//! [`compos`] ties the layers together for block-structured scenarios, and
//! the `mullat` binary exposes everything on the command line.

pub mod compos;
pub mod epmod;
pub mod kummer;
pub mod multfield;
pub mod puiseux;

pub mod cli;

pub(crate) mod jsonio;
