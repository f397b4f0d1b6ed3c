use std::fmt;

/// Errors surfaced by dynamics, synthesis, and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Pitch angle too close to ±π/2; the Euler-rate map is singular there.
    SingularAttitude { theta: f64 },
    /// An input contained NaN or ±inf.
    NonFinite(&'static str),
    /// A physical parameter violated its validity range.
    InvalidParameter(String),
    /// A rotor speed fell outside the configured [min, max] band.
    RotorSpeedOutOfRange { index: usize, speed: f64 },
    /// The Hamiltonian has eigenvalues on (or too near) the imaginary axis,
    /// or the stable subspace does not have the expected dimension.
    NotStabilizable,
    /// QR iteration on the Hamiltonian failed to converge.
    SchurFailed,
    /// Riccati/Lyapunov residual stayed above tolerance after the iteration cap.
    NoConvergence { residual: f64 },
    /// A matrix required to be Hurwitz has an eigenvalue with Re ≥ 0.
    NotHurwitz { max_real: f64 },
    /// A matrix required to be positive definite failed its Cholesky test.
    NotPositiveDefinite(&'static str),
    /// Operand shapes do not line up.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularAttitude { theta } => {
                write!(f, "attitude singular: |pitch| = {:.6} rad is too close to pi/2", theta.abs())
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::RotorSpeedOutOfRange { index, speed } => {
                write!(f, "rotor {index} speed {speed} rad/s outside configured limits")
            }
            Error::NotStabilizable => {
                write!(f, "system pair is not stabilizable/detectable (Hamiltonian eigenvalues near the imaginary axis)")
            }
            Error::SchurFailed => write!(f, "Schur decomposition did not converge"),
            Error::NoConvergence { residual } => {
                write!(f, "solver did not converge: residual {residual:.3e}")
            }
            Error::NotHurwitz { max_real } => {
                write!(f, "matrix is not Hurwitz: max eigenvalue real part {max_real:.3e}")
            }
            Error::NotPositiveDefinite(what) => write!(f, "{what} is not positive definite"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
