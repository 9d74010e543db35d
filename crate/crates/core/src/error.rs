use thiserror::Error;

/// Errors raised by the scattering toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    #[error("potential is not Hermitian at x={x:.6}: defect {defect:.3e}")]
    NonHermitian { x: f64, defect: f64 },

    #[error("potential has empty support")]
    EmptySupport,

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("boundary pair is not self-adjoint: |B†A - A†B| = {defect:.3e}")]
    NotSelfAdjointPair { defect: f64 },

    #[error("boundary pair is degenerate: min eig(A†A + B†B) = {min_eig:.3e}")]
    DegeneratePair { min_eig: f64 },

    #[error("coupling matrix is not Hermitian: defect {defect:.3e}")]
    NonHermitianCoupling { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Volterra iteration did not converge at k={k:.6} (last update {update:.3e})")]
    NoConvergence { k: f64, update: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Fourier tail not negligible: ratio {ratio:.3e} at K_max")]
    TailNotNegligible { ratio: f64 },

    #[error("Jost matrix singular at k={k:.6} (min singular value {sigma_min:.3e})")]
    SingularJost { k: f64, sigma_min: f64 },

    #[error("no plateau for S at high energy: deviation {deviation:.3e}")]
    NoPlateau { deviation: f64 },

    #[error("Hilbert window too small: outer mass fraction {fraction:.3e}")]
    WindowTooSmall { fraction: f64 },

    #[error("Schur bound exceeded: row {row:.3e}, column {col:.3e}, bound {bound:.3e}")]
    SchurUnbounded { row: f64, col: f64, bound: f64 },

    #[error("hypothesis S(0) = S_inf = I violated: |S0 - I| = {s0_defect:.3e}, |Sinf - I| = {sinf_defect:.3e}")]
    HypothesisViolated { s0_defect: f64, sinf_defect: f64 },

    #[error("bound states present: {eigenvalues:?}")]
    BoundStatesPresent { eigenvalues: Vec<f64> },

    #[error("evolution domain reflection: outer mass fraction {fraction:.3e}")]
    DomainReflection { fraction: f64 },

    #[error("ODE integration too stiff at x={x:.6}")]
    StiffIntegration { x: f64 },

    #[error("pipeline domain error: {0}")]
    PipelineDomain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, ScatterError>;
