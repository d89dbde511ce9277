use thiserror::Error;

/// Errors raised by the workbench. Variants name the violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("degenerate form (determinant 0)")]
    DegenerateForm,
    #[error("unknown lattice name `{0}`")]
    UnknownName(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("rescaling by zero")]
    ZeroScale,
    #[error("lattice is odd; operation needs an even lattice")]
    OddLattice,
    #[error("subgroup is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("finite group of order {order} exceeds the search bound {bound}")]
    TooLarge { order: String, bound: u64 },
    #[error("discriminant group is not 2-elementary")]
    NotTwoElementary,
    #[error("coparity is 1 (some discriminant value is not integral)")]
    CoparityOne,
    #[error("lattice is definite; criterion needs an indefinite lattice")]
    DefiniteLattice,
    #[error("lattice is not hyperbolic (signature must be (1, n))")]
    NotHyperbolic,
    #[error("sublattice is not isometric to E8(-2)")]
    NotE8Minus2,
    #[error("ranks differ ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error("involution invalid: {0}")]
    NotInvolution(String),
    #[error("r + a is odd; g and k are not integral")]
    NonIntegralGK,
    #[error("no primitive vector of norm {0} found")]
    NoSuitableVector(i64),
    #[error("orthogonal complement is not definite")]
    ComplementNotDefinite,
    #[error("sublattice is not primitive")]
    NotPrimitive,
    #[error("binary form is not even positive definite")]
    NotEvenDefinite,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no isometry with coefficients bounded by {bound}")]
    SearchExhausted { bound: u32 },
    #[error("form is not definite")]
    NotDefinite,
    #[error("form is not indefinite")]
    NotIndefinite,
    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(String),
    #[error("discriminants differ ({0} vs {1})")]
    DiscriminantMismatch(String, String),
    #[error("|m| = {m} is outside the cycle method range (needs |m| < sqrt(D)/2 for D = {disc})")]
    OutOfMethodRange { m: String, disc: String },
    #[error("lattice is not positive definite")]
    NotPositiveDefinite,
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("value does not fit the machine word used by the enumeration")]
    Overflow,
    #[error("invalid Fourier-Mukai parameters: {0}")]
    BadParameters(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
