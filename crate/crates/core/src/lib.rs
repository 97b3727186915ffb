//! Exact symbolic verification engine for the monodromy cubics of the
//! Painlevé equations, their shear-coordinate parameterizations, braid and
//! cluster dynamics, confluence cascade, versal unfoldings and quantisation.

pub mod coeffring;
pub mod qtorus;
pub mod catalog;
pub mod report;
pub mod shear;
pub mod dynamics;
pub mod confluence;
pub mod quantise;
pub mod unfolding;
pub mod suites;

/// Seed for randomized cross-checks when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5eed;

pub use catalog::{CubicPolynomial, CubicSpec, DynkinLabel};
pub use coeffring::{sym, CoeffFraction, CoeffPoly, Monomial, Rational, RingError, Symbol, SymbolTable};
pub use confluence::{CascadeGraph, ConfluenceStep};
pub use qtorus::{Mode, TorusElement, TorusError};
pub use report::{Residual, Status, VerificationReport};
pub use suites::{EngineError, Job, Suite};
