//! Coefficient functionals of the Ozaki close-to-convex classes `F` and `G`,
//! and numerical verification of their sharp bounds.
//!
//! * [`series`]: truncated complex power series (products, quotients,
//!   composition, inversion, `exp`/`log`/real powers).
//! * [`classes`]: class members built from Schwarz or Carathéodory data,
//!   the four extremal functions, and the direct coefficient formulas.
//! * [`functionals`]: inverse, logarithmic and logarithmic-inverse
//!   coefficients, Schwarzian initial values, the Hermitian-Toeplitz
//!   determinant of logarithmic coefficients.
//! * [`verifier`]: the bound ledger, extremal checks, grid extremization of
//!   the reduced objectives and randomized sampling.
//! * [`cli`]: the `ozaki` command-line front end.

pub mod classes;
pub mod cli;
pub mod functionals;
mod serde_util;
pub mod series;
pub mod verifier;

pub use classes::{ClassLabel, ExtremalName, OzakiFunction, SchwarzCoeffs};
pub use functionals::{full_report, CoeffTriple, FunctionalReport};
pub use series::{NormalizedFunction, TruncatedSeries};
pub use verifier::{BoundLedger, ObjectiveId, OptResult, SampleConfig, SampleReport};
