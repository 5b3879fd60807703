use thiserror::Error;

/// Everything that can go wrong while building or evaluating kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha out of range: {0} (standard weights need alpha > -1)")]
    AlphaOutOfRange(f64),
    #[error("gamma out of range: {0} (gaussian weights need gamma > 0)")]
    GammaOutOfRange(f64),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("non-integrable weight: {0}")]
    NonIntegrable(String),
    #[error("moment underflow at index {index}: log10 of the moment is {log10}")]
    MomentUnderflow { index: usize, log10: f64 },
    #[error("moment overflow at index {index}: log10 of the moment is {log10}")]
    MomentOverflow { index: usize, log10: f64 },
    #[error("insufficient moments: need at least {needed}, have {have}")]
    InsufficientMoments { needed: usize, have: usize },
    #[error("density is singular at the origin")]
    SingularAtOrigin,
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("truncation insufficient: tail bound {tail_bound:e} exceeds {tol:e} with {terms} terms")]
    TruncationInsufficient {
        tail_bound: f64,
        tol: f64,
        terms: usize,
    },
    #[error("outside domain: |zeta| = {modulus} but the limit is {limit}")]
    OutsideDomain { modulus: f64, limit: f64 },
    #[error("no closed form for this weight")]
    NoClosedForm,
    #[error("branch point at zeta = 1")]
    BranchPoint,
    #[error("diagonal divergence at |z|^2 = {0}")]
    DiagonalDivergence(f64),
    #[error("kernel has zero inside the domain ({count} found)")]
    KernelHasZero { count: usize },
    #[error("invalid exponent p = {0}")]
    InvalidExponent(f64),
    #[error("depth cap exceeded: {requested} > {cap}")]
    DepthCap { requested: usize, cap: usize },
    #[error("threshold search exhausted below alpha = {0}")]
    ThresholdExhausted(f64),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("root iteration stalled after {iterations} iterations")]
    RootIterationStalled { iterations: usize },
    #[error("zero near contour at radius {radius}")]
    ZeroNearContour { radius: f64 },
    #[error("analyticity violated: contour radius {radius} >= {limit}")]
    AnalyticityViolated { radius: f64, limit: f64 },
    #[error("roots not all inside disk: largest modulus {largest}")]
    RootsNotAllInsideDisk { largest: f64 },
    #[error("tail not certifiable below the truncation cap")]
    TailNotCertifiable,
    #[error("magnitude overflow: log of the value is {log_re} + {log_im}i")]
    MagnitudeOverflow { log_re: f64, log_im: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
