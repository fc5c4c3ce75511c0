//! Exact and numerical companions to square function estimates for the
//! moment curve `(T, T^2, ..., T^n)`.
//!
//! * [`local_field`]: the reals, complex numbers and `Q_p`, their partitions,
//!   absolute values and additive characters.
//! * [`symmetric`]: power sums, elementary symmetric polynomials and the
//!   Girard–Newton recurrence.
//! * [`syzygy`]: enumeration of the tuples of cells whose curve sums nearly
//!   coincide, exactly over `Q_p` and by sampling over the reals.
//! * [`vinogradov`]: exact solution counts for the Vinogradov system.
//! * [`extension`]: extension operators, square functions and weighted
//!   `L^{2n}` norms.
//! * [`bounds`]: every explicit constant as a computable function.

pub mod bounds;
pub mod curve;
pub mod error;
pub mod extension;
pub mod local_field;
pub mod poly;
pub mod summation;
pub mod symmetric;
pub mod syzygy;
pub mod vinogradov;

pub use curve::Curve;
pub use error::{Error, Result};
pub use local_field::{Cell, CellIndex, CellTuple, FieldSpec, PAdicApprox, Prime, Scale};
pub use poly::Polynomial;

/// Upper limit on hash insertions (and comparable inner-loop steps) for any
/// single enumeration.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;
