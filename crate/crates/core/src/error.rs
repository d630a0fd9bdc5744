use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field context mismatch: F_{left} vs F_{right}")]
    ContextMismatch { left: u64, right: u64 },
    #[error("{0} is not a supported prime modulus")]
    NotPrime(u64),
    #[error("generator must be a nonzero field element")]
    ZeroGenerator,
    #[error("duplicate interpolation node x = {0}")]
    DuplicateNode(u64),
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("generator order {order} is smaller than m*n = {required}")]
    OrderTooSmall { order: u64, required: u64 },
    #[error("evaluation points collide: gamma^{j1}*alpha_{i1} = gamma^{j2}*alpha_{i2}")]
    PointCollision { i1: usize, j1: usize, i2: usize, j2: usize },
    #[error("degree bound exceeded: {degree} >= {bound}")]
    DegreeOverflow { degree: usize, bound: usize },
    #[error("field too small: q = {q} must exceed m*n = {mn}")]
    FieldTooSmall { q: u64, mn: u64 },
    #[error("enumeration of {size} items exceeds cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("index {index} out of range (len {len})")]
    IndexError { index: usize, len: usize },
    #[error("basepoint must be nonzero")]
    InvalidBasepoint,
    #[error("subspace dimension {dim} must lie in 1..={m}")]
    DesignPreconditionViolated { dim: usize, m: usize },
    #[error("polynomial must be nonzero")]
    ZeroPolynomial,
    #[error("interpolation system has only the zero solution")]
    InterpolationInfeasible,
    #[error("every coordinate kernel equals a nonzero subspace")]
    DegenerateSubspace,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("ambient cluster has dimension {dim} > r = {r}")]
    ClusterTooLarge { dim: usize, r: usize },
    #[error("line stitching failed after {attempts} pin samples")]
    StitchFailed { attempts: usize },
    #[error("word is not a codeword")]
    NotACodeword,
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
    #[error("configuration error: {0}")]
    Config(String),
}
