use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {what} (iterations {iterations}, residual {residual:e})")]
    NumericFailure {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate row {row}: norm below threshold")]
    DegenerateRow { row: usize },

    #[error("ill-conditioned matrix (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("singular mixing matrix: {0}")]
    SingularMixing(String),

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("rank-deficient input: residual vanished after {picked} of {requested} picks")]
    RankDeficient { picked: usize, requested: usize },

    #[error("degenerate cone: origin lies in the convex hull (min-norm {norm:e})")]
    DegenerateCone { norm: f64 },

    #[error("clustering failure: {0}")]
    ClusteringFailure(String),

    #[error("corner failure: no margin threshold produced {k} distinct clusters")]
    CornerFailure { k: usize },

    #[error("estimation failure (corners {corners:?}): {source}")]
    EstimationFailure {
        corners: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("config rejected: {field} = {value}: {reason}")]
    ConfigRejected {
        field: String,
        value: String,
        reason: String,
    },

    #[error("trial {trial} at grid value {value} failed: {source}")]
    TrialFailed {
        value: f64,
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn rejected(field: impl Into<String>, value: impl ToString, reason: impl Into<String>) -> Self {
        Error::ConfigRejected {
            field: field.into(),
            value: value.to_string(),
            reason: reason.into(),
        }
    }
}
