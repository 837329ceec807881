//! Error type shared by every fallible operation in the crate.

use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid construction rejected (dimension, size, or period out of contract).
    InvalidGrid(&'static str),
    /// A field value is NaN or infinite; carries the first offending flat index.
    NonFinite { index: usize },
    /// A multiplier symbol breaks conjugate symmetry at the given mode index,
    /// so its output would not be real.
    HermitianViolation { index: usize },
    /// Exponent outside its admissible range.
    InvalidExponent(&'static str),
    /// (p, q, r) do not satisfy 1/r = 1/p + 1/q within tolerance.
    ExponentMismatch { expected_r: f64, got_r: f64 },
    /// A length scale or scale pair is out of order or non-positive.
    InvalidScale(&'static str),
    /// A documented precondition does not hold for the supplied inputs.
    Precondition(&'static str),
    /// Time step too large for the advective CFL bound or diffusive stability.
    CflViolation { admissible_dt: f64 },
    /// Operands live on different grids.
    GridMismatch,
    /// Requested modes exceed the grid Nyquist wavenumber; carries the
    /// largest admissible truncation index.
    NyquistViolation { max_admissible: usize },
    /// Kernel kind not supported by the requested operation.
    UnsupportedKernel(&'static str),
    /// An interval or index range is empty.
    EmptyRange(&'static str),
    /// A requested window does not intersect the scanned range.
    WindowOutsideScan,
    /// Operation undefined on the zero field.
    ZeroField,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::NonFinite { index } => {
                write!(f, "non-finite value at flat index {index}")
            }
            Error::HermitianViolation { index } => write!(
                f,
                "symbol breaks conjugate symmetry at mode index {index}; output would be complex"
            ),
            Error::InvalidExponent(msg) => write!(f, "invalid exponent: {msg}"),
            Error::ExponentMismatch { expected_r, got_r } => write!(
                f,
                "exponent triple violates 1/r = 1/p + 1/q: expected r = {expected_r}, got {got_r}"
            ),
            Error::InvalidScale(msg) => write!(f, "invalid scale: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::CflViolation { admissible_dt } => write!(
                f,
                "time step violates stability; largest admissible dt = {admissible_dt}"
            ),
            Error::GridMismatch => write!(f, "operands live on different grids"),
            Error::NyquistViolation { max_admissible } => write!(
                f,
                "requested modes exceed the grid Nyquist wavenumber; max admissible n = {max_admissible}"
            ),
            Error::UnsupportedKernel(msg) => write!(f, "unsupported kernel: {msg}"),
            Error::EmptyRange(msg) => write!(f, "empty range: {msg}"),
            Error::WindowOutsideScan => {
                write!(f, "window does not intersect the scanned delta range")
            }
            Error::ZeroField => write!(f, "operation undefined on the zero field"),
        }
    }
}

impl core::error::Error for Error {}
