use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("arc {arc}: {msg}")]
    Arc { arc: usize, msg: String },

    #[error(
        "boundary is not closed: end of arc {arc} is {gap:e} away from the start of the next arc"
    )]
    NotClosed { arc: usize, gap: f64 },

    #[error("boundary self-intersects between arc {arc} and arc {other}")]
    SelfIntersection { arc: usize, other: usize },

    #[error("base point lies outside the domain (winding number {winding})")]
    OutsideDomain { winding: i64 },

    #[error("point is within {dist:e} of the boundary")]
    TooCloseToBoundary { dist: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("index {index} out of range (max {max})")]
    OutOfRange { index: usize, max: usize },

    #[error("non-finite integrand at node {node}")]
    NonFinite { node: usize },

    #[error("Gram matrix is not positive definite at pivot {pivot}; try {suggest} bits")]
    NotPositiveDefinite { pivot: usize, suggest: u32 },

    #[error("singular linear system at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("discrete measure is rank deficient at degree {degree}")]
    RankDeficient { degree: usize },

    #[error("degenerate basis: S_n = {s:e}")]
    DegenerateBasis { s: f64 },

    #[error("orthonormality residual {residual:e} exceeds tolerance {tol:e}")]
    InsufficientPrecision { residual: f64, tol: f64 },

    #[error("degree budget {budget} exhausted: {msg}")]
    BudgetExhausted { budget: usize, msg: String },

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("not enough usable points: {got} < {need}")]
    TooFewPoints { got: usize, need: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    /// True for failures of the numerical pipeline, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::Singular { .. }
                | Error::NoConvergence(_)
                | Error::DegenerateBasis { .. }
                | Error::RankDeficient { .. }
                | Error::InsufficientPrecision { .. }
                | Error::BudgetExhausted { .. }
                | Error::Containment(_)
                | Error::TooFewPoints { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
