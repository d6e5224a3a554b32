use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Only the antiperiodic (even fermion number) Fourier sector is implemented.
    #[error("odd number of sites ({0}): only the antiperiodic even-parity sector is supported")]
    SectorMismatch(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("gapless point at phi = {phi}: Bogoliubov angle is undefined")]
    Gapless { phi: f64 },

    #[error("site index {index} out of range for a chain of {n_sites} sites")]
    IndexOutOfRange { index: usize, n_sites: usize },

    #[error("field |h| = {0} lies outside [-1, 1]: phi_h is undefined")]
    FieldOutOfRange(f64),

    #[error("{what} did not converge: estimated error {est_error:e} above tolerance {tol:e}")]
    NotConverged {
        what: String,
        est_error: f64,
        tol: f64,
    },

    #[error("exact diagonalization limited to 12 sites, got {0}")]
    TooManySites(usize),

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("singular linear system")]
    Singular,

    #[error("time grid too coarse: {0}")]
    GridTooCoarse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors raised by iterative numerics that failed to meet a tolerance.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::NotConverged { .. })
    }
}
