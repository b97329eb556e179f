use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input: {0}")]
    Input(String),

    #[error("edge list row {row}: {reason}")]
    Row { row: usize, reason: String },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("model: {0}")]
    Model(String),

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("covariate `{0}` is constant across dyads; its coefficient is unidentified")]
    ConstantCovariate(String),

    #[error("optimizer did not converge after {iterations} iterations: {trace}")]
    NonConvergence { iterations: usize, trace: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used by the CLI error prefix and the C status codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) | Error::Row { .. } => "input",
            Error::Undefined(_) => "undefined",
            Error::UnknownAttribute(_) => "attribute",
            Error::Model(_) | Error::Degenerate(_) | Error::ConstantCovariate(_) => "model",
            Error::Quadrature(_) => "quadrature",
            Error::NonConvergence { .. } => "convergence",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
