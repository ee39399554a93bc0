use std::fmt;

/// Everything that can go wrong while building or running a calculation.
///
/// Variants split into three rough families, which the CLI maps to exit
/// codes: bad input (rejected before any mathematics runs), structure
/// checks that a perfectly valid matrix can fail (not symplectic, not
/// complex-linear), and internal property violations that indicate a bug
/// rather than a property of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input rows are empty, ragged, or not n x n.
    NotSquare,
    /// Determinant is not +1 or -1.
    NotUnimodular { determinant: String },
    /// Two forms (or a form and an operator) live in different frames.
    FrameMismatch,
    /// A complex frame needs an even number of real coordinates.
    OddDimension { n: usize },
    /// Subspaces of different ambient dimensions were combined.
    AmbientMismatch { left: usize, right: usize },
    /// Quotient denominator is not contained in the numerator.
    NotContained { detail: String },
    /// An operator mapped an invariant vector outside the invariant subspace.
    NonInvariantImage { detail: String },
    /// The matrix does not preserve the standard symplectic form.
    NotSymplectic,
    /// Symplectic data needs an even number of coordinates.
    OddCodimension { n: usize },
    /// The matrix does not commute with the standard complex structure.
    NotComplexCompatible,
    /// The wedge pairing used to define the symplectic star was singular.
    SingularWedgePairing { degree: usize },
    /// A requested theory needs a structure that was not supplied.
    StructureMissing { theory: String },
    /// Growth classification needs at least `need` samples.
    InsufficientSamples { have: usize, need: usize },
    /// A configuration file or command line was rejected before any
    /// mathematics ran.
    InvalidInput { detail: String },
    /// An exact operator identity failed; this is a bug, not an input error.
    PropertyViolation { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare => write!(f, "matrix is not square"),
            Error::NotUnimodular { determinant } => {
                write!(f, "matrix determinant is {determinant}, expected +1 or -1")
            }
            Error::FrameMismatch => write!(f, "operands live in different frames"),
            Error::OddDimension { n } => {
                write!(f, "complex frame needs an even dimension, got {n}")
            }
            Error::AmbientMismatch { left, right } => {
                write!(f, "ambient dimensions differ: {left} vs {right}")
            }
            Error::NotContained { detail } => {
                write!(f, "quotient denominator not contained in numerator: {detail}")
            }
            Error::NonInvariantImage { detail } => {
                write!(f, "operator image left the invariant subspace: {detail}")
            }
            Error::NotSymplectic => {
                write!(f, "matrix does not preserve the standard symplectic form")
            }
            Error::OddCodimension { n } => {
                write!(f, "symplectic structure needs an even dimension, got {n}")
            }
            Error::NotComplexCompatible => {
                write!(f, "matrix does not commute with the standard complex structure")
            }
            Error::SingularWedgePairing { degree } => {
                write!(f, "wedge pairing is singular in degree {degree}")
            }
            Error::StructureMissing { theory } => {
                write!(f, "theory {theory} needs a structure that was not requested")
            }
            Error::InsufficientSamples { have, need } => {
                write!(f, "growth verdict needs {need} samples, have {have}")
            }
            Error::InvalidInput { detail } => write!(f, "invalid input: {detail}"),
            Error::PropertyViolation { detail } => {
                write!(f, "internal property violation: {detail}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
