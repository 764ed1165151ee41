use std::fmt;

/// Errors raised anywhere in the pipeline.
///
/// Every variant maps to a stable machine-readable [`Error::code`] so the
/// command-line driver can report `{code, message, context}` records.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {lhs:?} vs {rhs:?}")]
    Dimension {
        op: &'static str,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },

    #[error("label error: {0}")]
    Label(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("non-deterministic computation: baseline evaluations {first} and {second} differ")]
    Determinism { first: f64, second: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing features: {}", .keys.join(", "))]
    MissingFeature { keys: Vec<String> },

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("invalid graph {image_id}: {}", Violations(.violations))]
    Validation {
        image_id: String,
        violations: Vec<String>,
    },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, lhs: &[usize], rhs: &[usize]) -> Self {
        Error::Dimension {
            op,
            lhs: lhs.to_vec(),
            rhs: rhs.to_vec(),
        }
    }

    /// Stable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::Label(_) => "label",
            Error::Contract(_) => "contract",
            Error::Determinism { .. } => "determinism",
            Error::Config(_) => "config",
            Error::Geometry(_) => "geometry",
            Error::Parse { .. } => "parse",
            Error::MissingFeature { .. } => "missing_feature",
            Error::Alignment(_) => "alignment",
            Error::Metric(_) => "metric",
            Error::Validation { .. } => "validation",
            Error::Checkpoint(_) => "checkpoint",
            Error::Io(_) => "io",
        }
    }

    /// Whether the error stems from bad input rather than an internal fault.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Contract(_) | Error::Determinism { .. })
    }
}

struct Violations<'a>(&'a [String]);

impl fmt::Display for Violations<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
