use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or input value violates a documented invariant.
    #[error("invalid value at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("resonance violated on link {link}: |Δ| - ν = {mismatch_mhz:.6} MHz")]
    ResonanceViolation { link: usize, mismatch_mhz: f64 },

    #[error("modulation frequency on link {link} must be positive")]
    ZeroModulationFrequency { link: usize },

    #[error("detuning ladder does not alternate in sign at link {link} (Δ = {detuning_mhz:.3} MHz)")]
    NonAlternatingDetuning { link: usize, detuning_mhz: f64 },

    #[error("Bessel argument {0} outside the supported range |x| <= 50")]
    BesselRange(f64),

    #[error(
        "target coupling {target_mhz:.6} MHz infeasible on link {link}; maximum achievable is {maximum_mhz:.6} MHz"
    )]
    Infeasible {
        link: usize,
        target_mhz: f64,
        maximum_mhz: f64,
    },

    #[error("integration step underflow: {required_steps} steps needed for one interval")]
    StepUnderflow { required_steps: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("unphysical decoherence on qubit {qubit}: {message}")]
    UnphysicalRates { qubit: usize, message: String },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("tomography input set is rank deficient (smallest singular value {smallest:e})")]
    RankDeficient { smallest: f64 },

    #[error("missing tomography basis `{0}`")]
    MissingBasis(&'static str),

    #[error("transfer amplitude {magnitude:e} too small to define a phase")]
    DegenerateAmplitude { magnitude: f64 },

    #[error("deconvolution would amplify a near-zero response band; use a positive regularization")]
    AmplificationOverflow,

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("configuration parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Whether the error stems from bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. }
                | Error::DimensionMismatch { .. }
                | Error::ResonanceViolation { .. }
                | Error::ZeroModulationFrequency { .. }
                | Error::NonAlternatingDetuning { .. }
                | Error::Infeasible { .. }
                | Error::UnphysicalRates { .. }
                | Error::InvalidProbability(_)
                | Error::MissingBasis(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}
