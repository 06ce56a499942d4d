use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not orthogonal (residual {residual:.3e})")]
    NotOrthogonal { residual: f64 },

    #[error("invalid conformal map: {0}")]
    InvalidConformal(String),

    #[error("invalid affine subspace: {0}")]
    InvalidSubspace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("group appears non-discrete: two distinct elements at distance {distance:.3e}")]
    NonDiscrete { distance: f64 },

    #[error("isometry does not act on the subspace by a translation (defect {defect:.3e})")]
    NotTranslationOnV { defect: f64 },

    #[error("vectors are inconsistent with a discrete additive subgroup: {0}")]
    NotALattice(String),

    #[error("element of the subgroup ball is missing from the ambient ball")]
    MembershipViolation,

    #[error("radius {requested} exceeds the valid range {available}")]
    RadiusTooLarge { requested: f64, available: f64 },

    #[error("counts contain zero at radius {radius}; use larger radii")]
    ZeroCount { radius: f64 },

    #[error("insufficient headroom: need counts up to {needed}, have {available}")]
    InsufficientHeadroom { needed: f64, available: f64 },

    #[error("matrices {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status for the command-line tools: 4 for unreadable or
    /// malformed input, 3 when the enumeration cannot decide discreteness,
    /// 1 for output failures and 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Json(_) | Error::Config(_) => 4,
            Error::NonDiscrete { .. } => 3,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }
}
