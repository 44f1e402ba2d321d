use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lattice window [{n_min}, {n_max}] does not contain exponent {needed}")]
    WindowTooSmall { n_min: i32, n_max: i32, needed: i32 },

    #[error("lattice windows do not match: expected [{expected_min}, {expected_max}], got [{got_min}, {got_max}]")]
    WindowMismatch {
        expected_min: i32,
        expected_max: i32,
        got_min: i32,
        got_max: i32,
    },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate arguments y = {y:e}, z = {z:e}: closed form undefined when y^2 = z^2")]
    DegenerateArguments { y: f64, z: f64 },

    #[error("symmetric eigensolver did not converge after {sweeps} sweeps")]
    SolverNoConvergence { sweeps: usize },

    #[error("function has zero norm")]
    ZeroFunction,

    #[error("index {index} out of range (count {count})")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("kernel mode requires an attached eigenbasis")]
    MissingBasis,
}
