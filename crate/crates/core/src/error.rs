use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("singular design: predictor has no variation")]
    SingularDesign,

    #[error("collinear design: predictor column {column} ({name}) is linearly dependent on earlier columns")]
    Collinearity { column: usize, name: String },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("invalid saturation level K={k}: must exceed every observed value (max {max_value})")]
    InvalidK { k: f64, max_value: f64 },

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("no overlapping years between `{first}` and `{second}`")]
    NoOverlap { first: String, second: String },

    #[error("{source_name}:{line}: {message}")]
    Format {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("{0}: no valid observations")]
    EmptySeries(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Wraps the error with a series or file name.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Short machine-greppable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self.root() {
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::InsufficientData { .. } => "INSUFFICIENT_DATA",
            Error::SingularDesign => "SINGULAR_DESIGN",
            Error::Collinearity { .. } => "COLLINEARITY",
            Error::DegenerateSeries(_) => "DEGENERATE_SERIES",
            Error::UndefinedCorrelation(_) => "UNDEFINED_CORRELATION",
            Error::InvalidK { .. } => "INVALID_K",
            Error::FitFailure(_) => "FIT_FAILURE",
            Error::NoOverlap { .. } => "NO_OVERLAP",
            Error::Format { .. } => "FORMAT",
            Error::EmptySeries(_) => "EMPTY_SERIES",
            Error::Io(_) => "IO",
            Error::Json(_) => "JSON",
            Error::Context { .. } => unreachable!("root() strips context"),
        }
    }

    /// Process exit code: 3 for fit failures, 2 for every other data or
    /// validation problem. Usage errors (4) never reach this type.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::FitFailure(_) => 3,
            _ => 2,
        }
    }
}
