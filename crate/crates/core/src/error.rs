use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("map is not surjective in degree {degree} (rank {rank} < {target_dim})")]
    NotSurjective {
        degree: i32,
        rank: usize,
        target_dim: usize,
    },
    #[error("requested arity {requested} exceeds the arity bound {bound}")]
    ArityExceeded { requested: usize, bound: usize },
    #[error("object map inconsistent with component {0}")]
    ObjectMapMismatch(String),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("structure is not minimal (m1 has {0} nonzero entries)")]
    NotMinimal(usize),
    #[error("algebra is not positively graded (found degree {0})")]
    NotPositivelyGraded(i32),
    #[error("truncation {have} too small, need at least {need}")]
    TruncationTooSmall { have: usize, need: usize },
    #[error("chain is not adapted at position {position}: {reason}")]
    NotAdapted { position: usize, degree: i32, reason: String },
    #[error("invalid contraction: {0}")]
    InvalidContraction(String),
    #[error("wrong module shape: {0}")]
    WrongModuleShape(String),
    #[error("pairing is not surjective (rank defect {rank_defect})")]
    PetriFails { rank_defect: usize },
    #[error("neither sign kills the arity-{arity} component at stage {stage}")]
    SignAmbiguity { stage: usize, arity: usize },
    #[error("minor size {size} exceeds matrix dimensions {rows}x{cols}")]
    SizeTooLarge { size: usize, rows: usize, cols: usize },
    #[error("linear parts of the entries are dependent")]
    DependentLinearParts,
    #[error("jet rings differ: {0}")]
    RingMismatch(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown fixture kind {0:?}")]
    UnknownFixture(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
