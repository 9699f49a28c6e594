use crate::correlations::Site;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("integrand evaluated within {dist:.3e} of a pole at u = {pole}")]
    PoleHit { pole: num_complex::Complex64, dist: f64 },

    #[error("model cannot be normalized: factor at column {column} has canonical parameter {param} within 1e-6 of 1 (pole on contour)")]
    NotNormalizable { column: i64, param: f64 },

    #[error("adaptive quadrature used {panels} panels without reaching tolerance {tol:.3e} (residual {residual:.3e})")]
    QuadratureDiverged { panels: usize, tol: f64, residual: f64 },

    #[error("determinant {value:.6e} outside [0,1] beyond clamp tolerance")]
    NumericallyIndefinite { value: f64 },

    #[error("window has {sites} sites, exceeding the exhaustive-enumeration cap of {cap}")]
    WindowTooLarge { sites: usize, cap: usize },

    #[error("column {column} does not carry the expected factor kind for this check")]
    WrongFactorKind { column: i64 },

    #[error("environment site ({0}, {1}) overlaps the move window")]
    OverlapError(i64, i64),

    #[error("conditioning event has probability {prob:.3e}, below 1e-14; sampler state is numerically broken")]
    ConditioningOnNullEvent { prob: f64 },

    #[error("interlacing violated between columns {column} and {next}: {detail}")]
    InterlacingViolation { column: i64, next: i64, detail: String },

    #[error("lozenge rendering requires beta-kind columns only (column {column} is alpha-kind)")]
    ModeUnsupported { column: i64 },

    #[error("box has {sites} sites, exceeding the enumeration cap of {cap}")]
    BoxTooLarge { sites: usize, cap: usize },

    #[error("no nonintersecting path tuple joins the given entrance and exit points")]
    EmptyEnsemble,

    #[error("boundary conditioning event has probability {prob:.3e}, below 1e-12")]
    NullConditioningEvent { prob: f64 },

    #[error("preset range too wide: column {column} canonical parameter {param:.3e} leaves (0,1)")]
    RangeTooWide { column: i64, param: f64 },

    #[error("column {column} must carry exactly one factor for path extraction")]
    NotSingleFactor { column: i64 },

    #[error("event lists share site ({0}, {1}) or contain duplicates", site.column, site.row)]
    InvalidEvent { site: Site },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
