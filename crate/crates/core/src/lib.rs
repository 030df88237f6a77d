//! Numerical verification of twisted calibrated subbundle constructions.
//!
//! The library builds twisted submanifolds of Euclidean spaces — conormal
//! bundles translated by a 1-form, and anti-self-dual / spinor bundles over a
//! surface translated by a bundle section — and checks the special Lagrangian,
//! associative, coassociative, and Cayley calibration conditions numerically
//! on sample grids, together with the supporting algebraic identities
//! (octonion arithmetic, symmetric-polynomial identities, frame derivatives,
//! holomorphicity and harmonicity of sections).

pub mod calibration;
pub mod error;
pub mod expr;
pub mod framejet;
pub mod grid;
pub mod immersion;
pub mod invariants;
pub mod octonion;
pub mod report;
pub mod scenarios;
pub mod section;
pub mod twist;

pub(crate) mod linalg;

pub use error::{Error, Result};
pub use octonion::Octonion;
