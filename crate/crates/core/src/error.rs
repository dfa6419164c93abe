use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("anchor ({x0}, {z0}) is incompatible with z'^2 = Q(z): {reason}")]
    InvalidAnchor { x0: f64, z0: f64, reason: String },

    #[error("{what} = {value} lies outside the admissible interval ({lo}, {hi})")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("evaluation at a pole: z = {0}")]
    Pole(f64),

    #[error("roots collide: |z_{i} - z_{j}| < {tol:e}", i = .0, j = .1, tol = .2)]
    Collision(usize, usize, f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian (estimated condition {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("interior singularity of P/Q at z = {0} inside the coordinate image")]
    InteriorSingularity(f64),

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("eigensolver did not converge for index {0}")]
    EigenNonConvergence(usize),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("{0}")]
    Parse(String),
}
