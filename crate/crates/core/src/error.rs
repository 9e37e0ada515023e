use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} below -{clamp_tol:e}")]
    IndefiniteMatrix { min_eigenvalue: f64, clamp_tol: f64 },

    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: String,
        right: String,
    },

    #[error("invalid correlation coefficient: |rho| = {magnitude} exceeds 1")]
    InvalidCorrelation { magnitude: f64 },

    #[error("invalid RIS geometry: {reason}")]
    InvalidGeometry { reason: String },

    #[error("invalid Von Mises concentration: kappa = {kappa}")]
    InvalidKappa { kappa: f64 },

    #[error("invalid distance: {distance} (must be positive and finite)")]
    InvalidDistance { distance: f64 },

    #[error("coincident nodes: {link} distance is zero")]
    CoincidentNodes { link: String },

    #[error("invalid characteristic-function value: varphi = {varphi} outside [0, 1]")]
    InvalidCf { varphi: f64 },

    #[error("degenerate channel statistic: eta = {eta} (must be positive)")]
    DegenerateEta { eta: f64 },

    #[error("singular covariance: tr(Psi_{user}) = 0")]
    SingularCovariance { user: usize },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
