use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("gamma pole at z = {0}")]
    GammaPole(Complex64),
    #[error("singular argument z = {0}")]
    SingularArgument(Complex64),
    #[error("precision exhausted: estimated relative error {0:e}")]
    PrecisionExhausted(f64),
    #[error("branch point at alpha = {0}")]
    BranchPoint(Complex64),
    #[error("bracket failure at theta = {theta}: H = {h_lo} at x = {lo}, H = {h_hi} at x = {hi}")]
    BracketFailure {
        theta: f64,
        lo: f64,
        hi: f64,
        h_lo: f64,
        h_hi: f64,
    },
    #[error("matching failure at r_min = {r_min}: condition estimate {condition:e}")]
    MatchingFailure { r_min: f64, condition: f64 },
    #[error("series divergent at k = {0}")]
    SeriesDivergent(f64),
    #[error("too close to lattice singularity at s = {0}")]
    LatticeSingularity(Complex64),
    #[error("boundary zero suspected near s = {0}")]
    BoundaryZero(Complex64),
    #[error("completeness certificate failed: mode {l} has zeros in the disk and l_max ceiling {ceiling} reached")]
    CertificateFailure { l: usize, ceiling: usize },
    #[error("insufficient data: t = {t} exceeds computed radius {t_max}")]
    InsufficientData { t: f64, t_max: f64 },
    #[error("non-differentiable angle theta = {0}")]
    NonDifferentiableAngle(f64),
    #[error("oscillatory failure: {0}")]
    OscillatoryFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
