//! Exact-arithmetic toolkit for the local lifting problem.
//!
//! Computes higher ramification filtrations and differents, Artin-Schreier-
//! Witt normal forms and their jumps, KGB obstruction verdicts with
//! characteristic-zero witnesses, explicit cyclic lifts verified by the
//! different criterion, depth profiles of degree-p covers of discs, stable
//! models of marked open unit discs, and Hurwitz trees with full axiom
//! validation. Everything is exact: finite fields, rationals, and truncated
//! Eisenstein-ring arithmetic with explicit precision tracking; no floating
//! point anywhere.

pub mod algebra;
pub mod asw;
pub mod discgeom;
pub mod error;
pub mod groups;
pub mod hurwitz;
pub mod jsonio;
pub mod kgb;
pub mod lifting;
pub mod padic;
pub mod ramification;
pub mod rat;

pub use error::{Error, Result};
pub use rat::Rat;
