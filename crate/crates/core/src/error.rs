use thiserror::Error;

pub type Result<T> = core::result::Result<T, ZenoError>;

/// Failure modes shared by every module.
///
/// Each variant names the invariant or precondition that was violated, so
/// callers can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZenoError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed data: {0}")]
    MalformedData(&'static str),

    #[error("operator is not hermitian (max |A - A^+| = {defect:e})")]
    NonHermitianInput { defect: f64 },

    #[error("operator is not unitary (max |A^+ A - I| = {defect:e})")]
    NonUnitaryInput { defect: f64 },

    #[error("operator is not a projector (max |A^2 - A| = {defect:e})")]
    NotAProjector { defect: f64 },

    #[error("state vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix (trace = {trace}, min eigenvalue = {min_eigenvalue:e})")]
    InvalidDensityMatrix { trace: f64, min_eigenvalue: f64 },

    #[error("negative spectrum: eigenvalue {eigenvalue:e} is below the clamping threshold")]
    NegativeSpectrum { eigenvalue: f64 },

    #[error("vectors are linearly dependent (smallest Gram eigenvalue {min_gram_eigenvalue:e})")]
    RankDeficient { min_gram_eigenvalue: f64 },

    #[error("invalid partition: {reason} (defect {defect:e})")]
    InvalidPartition { reason: &'static str, defect: f64 },

    #[error("survival probability vanishes at tau = {tau}")]
    VanishingSurvival { tau: f64 },

    #[error("fit window holds {samples} samples, at least 8 are required")]
    WindowTooNarrow { samples: usize },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("time {t} is not a whole number of pulse periods {period}")]
    NonCommensurateTime { t: f64, period: f64 },

    #[error("time {t} is not an integer multiple of the lattice spacing {dx}")]
    NonLatticeTime { t: f64, dx: f64 },

    #[error("window holds {width} points, at least 4 are required")]
    WindowTooSmall { width: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("eigenphase decomposition failed (residual {residual:e})")]
    SpectralDecompositionFailed { residual: f64 },

    #[error("pulse area tau0 = {tau0} is resonant: phase difference {phase} is a multiple of 2 pi")]
    ResonantPulseArea { tau0: f64, phase: f64 },

    #[error("eigensolver did not converge")]
    NoConvergence,
}

impl ZenoError {
    /// Short machine-readable name of the violated invariant.
    pub fn invariant(&self) -> &'static str {
        match self {
            ZenoError::DimensionMismatch { .. } => "DimensionMismatch",
            ZenoError::MalformedData(_) => "MalformedData",
            ZenoError::NonHermitianInput { .. } => "NonHermitianInput",
            ZenoError::NonUnitaryInput { .. } => "NonUnitaryInput",
            ZenoError::NotAProjector { .. } => "NotAProjector",
            ZenoError::NotNormalized { .. } => "NotNormalized",
            ZenoError::InvalidDensityMatrix { .. } => "InvalidDensityMatrix",
            ZenoError::NegativeSpectrum { .. } => "NegativeSpectrum",
            ZenoError::RankDeficient { .. } => "RankDeficient",
            ZenoError::InvalidPartition { .. } => "InvalidPartition",
            ZenoError::VanishingSurvival { .. } => "VanishingSurvival",
            ZenoError::WindowTooNarrow { .. } => "WindowTooNarrow",
            ZenoError::InvalidBracket { .. } => "InvalidBracket",
            ZenoError::InvalidParameter { .. } => "InvalidParameter",
            ZenoError::NonCommensurateTime { .. } => "NonCommensurateTime",
            ZenoError::NonLatticeTime { .. } => "NonLatticeTime",
            ZenoError::WindowTooSmall { .. } => "WindowTooSmall",
            ZenoError::InvalidGrid(_) => "InvalidGrid",
            ZenoError::SpectralDecompositionFailed { .. } => "SpectralDecompositionFailed",
            ZenoError::ResonantPulseArea { .. } => "ResonantPulseArea",
            ZenoError::NoConvergence => "NoConvergence",
        }
    }
}
