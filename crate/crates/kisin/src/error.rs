//! Error type shared by the whole crate.
//!
//! Precision exhaustion is deliberately kept distinct from mathematical
//! failure: callers re-run at doubled working precision on
//! [`Error::PrecisionInsufficient`] / [`Error::PrecisionNotStabilized`],
//! while the other variants are final answers.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands live over different coefficient fields.
    MismatchedField,
    /// Matrix dimensions do not fit the operation.
    DimensionMismatch(String),
    /// Operation requires a square matrix.
    NonSquare,
    /// Determinant is zero to the available precision; the matrix is
    /// singular or the precision is exhausted.
    SingularToPrecision,
    /// Inversion of a series that is zero to its precision.
    ZeroToPrecision,
    /// A verdict (valuation, pivot choice, membership) could not be decided
    /// at the available precision.
    PrecisionInsufficient(String),
    /// The solution space of a linear system changed between the working
    /// precision and its double.
    PrecisionNotStabilized,
    /// Generators do not span a full-rank lattice.
    RankDeficient,
    /// The assembled module violates the height bound: some elementary
    /// divisor exponent exceeds `e*r`.
    HeightViolated { divisor: i64, bound: i64 },
    /// The operation needs a finite height bound `r`.
    UnboundedHeight,
    /// Modules or lattices with incompatible parameters `(p, f, e, r)`.
    ParameterMismatch(String),
    /// The exhaustive census would exceed the size guard.
    GuardExceeded { bits: u32 },
    /// The sequence is not in the class S (its fractional invariants are
    /// not pairwise distinct), so the requested classification does not
    /// apply.
    NotInS,
    /// Operation requires maximal source and target.
    NotMaximal,
    /// Operation requires minimal source and target.
    NotMinimal,
    /// Induced map on suprema is not integral; the inputs were not
    /// restrictions of a common ambient map.
    InconsistentSup,
    /// Invalid field parameters (p not prime, modulus reducible, ...).
    BadFieldParams(String),
    /// Catch-all for malformed input data.
    Invalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MismatchedField => write!(out, "mismatched coefficient fields"),
            Error::DimensionMismatch(s) => write!(out, "dimension mismatch: {s}"),
            Error::NonSquare => write!(out, "matrix is not square"),
            Error::SingularToPrecision => {
                write!(out, "determinant zero to precision: singular or precision exhausted")
            }
            Error::ZeroToPrecision => write!(out, "cannot invert: zero to precision"),
            Error::PrecisionInsufficient(s) => write!(out, "insufficient precision: {s}"),
            Error::PrecisionNotStabilized => {
                write!(out, "solution space did not stabilize under precision doubling")
            }
            Error::RankDeficient => write!(out, "generators are rank-deficient"),
            Error::HeightViolated { divisor, bound } => {
                write!(out, "height violated: divisor exponent {divisor} exceeds bound {bound}")
            }
            Error::UnboundedHeight => write!(out, "operation requires finite height r"),
            Error::ParameterMismatch(s) => write!(out, "parameter mismatch: {s}"),
            Error::GuardExceeded { bits } => {
                write!(out, "instance too large for exhaustive census ({bits} bits)")
            }
            Error::NotInS => write!(out, "sequence is not in S: invariants t_i not pairwise distinct"),
            Error::NotMaximal => write!(out, "source and target must be maximal"),
            Error::NotMinimal => write!(out, "source and target must be minimal"),
            Error::InconsistentSup => write!(out, "induced map on suprema is not integral"),
            Error::BadFieldParams(s) => write!(out, "bad field parameters: {s}"),
            Error::Invalid(s) => write!(out, "invalid input: {s}"),
        }
    }
}

impl core::error::Error for Error {}
