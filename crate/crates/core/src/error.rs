use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("continued fraction of a rational value terminates after {0} digits")]
    RationalInput(usize),
    #[error("value {0} is outside the open unit interval")]
    OutOfRange(f64),
    #[error("invalid circle-map lift: {0}")]
    InvalidLift(String),
    #[error("rotation-number bracket failure: target {target} outside [{lo}, {hi}]")]
    BracketFailure { target: f64, lo: f64, hi: f64 },
    #[error("budget exhausted before tolerance {tol} (bracket width {width})")]
    BudgetExhausted { tol: f64, width: f64 },
    #[error("tolerance {0} is below the supported floor")]
    ToleranceTooSmall(f64),
    #[error("point {0} is within pole tolerance")]
    Pole(String),
    #[error("critical-point solver failed; best residual {best_residual:e}")]
    SolverFailure { best_residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("branch ambiguity in logarithm tracking")]
    Branch,
    #[error("orbit escapes too slowly for the Böttcher product (G = {0:e})")]
    SlowEscape(f64),
    #[error("sampled curve too coarse: angular step {0} exceeds pi")]
    Resample(f64),
    #[error("sampled curve passes through zero")]
    ZeroSample,
    #[error("winding residue {0} exceeds 0.1")]
    WindingResidue(f64),
    #[error("orbit points collide; reduce orbit length (at n = {0})")]
    OrbitCollision(usize),
    #[error("circle orbit order does not match the rigid rotation at n = {0}")]
    OrderMismatch(usize),
    #[error("barycenter Newton did not converge; last residual {0:e}")]
    Extension(f64),
    #[error("inversion failed to converge; last residual {0:e}")]
    Inversion(f64),
    #[error("Beltrami sample degenerate: |mu| = {0}")]
    DegenerateBeltrami(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
