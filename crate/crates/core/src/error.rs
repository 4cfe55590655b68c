use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("eigensolver did not converge on {what} after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NotConverged { what: String, sweeps: usize, off_norm: f64 },

    #[error("vectors are linearly dependent (Gram spectrum {gram_spectrum:?})")]
    RankDeficient { gram_spectrum: Vec<f64> },

    #[error("non-finite value on finite-difference stencil at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("differential is rank deficient at {point:?} (smallest singular value {sigma_min:.3e})")]
    Degenerate { point: Vec<f64>, sigma_min: f64 },

    #[error("tube radius {t} is focal or too close to the focal set: {detail}; choose a different radius")]
    FocalRadius { t: f64, detail: String },

    #[error("Lagrangian residual {residual:.3e} at {point:?} exceeds 1e-6; chart or normal field is inconsistent")]
    NotLagrangian { residual: f64, point: Vec<f64> },

    #[error("horizontal vectors live over different base points")]
    BaseMismatch,

    #[error("angles vary across samples (max variance {variance:.3e}); not isoparametric-type input")]
    NotIsoparametric { variance: f64 },

    #[error("immersion degenerates: sin(theta_{index} + c) = {value:.3e}")]
    DegenerateImmersion { index: usize, value: f64 },

    #[error("{0}")]
    Diagnostic(String),
}
