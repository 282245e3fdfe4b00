use std::path::PathBuf;

/// Errors produced anywhere in the toolkit.
///
/// The variants group into three families that the command-line front end
/// maps onto exit codes: input/format problems, configuration problems and
/// statistical failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The caller supplied input that the operation cannot work with
    /// (empty corpus, empty word, mismatched word, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A file could not be parsed. `context` locates the problem
    /// (line number, field name, array index).
    #[error("format error at {context}: {message}")]
    Format { context: String, message: String },

    /// A statistical procedure could not be carried out.
    #[error("statistics error: {0}")]
    Stat(String),

    /// A finalized morphological dataset has fewer items than the floor.
    #[error("dataset too small: {0} items (minimum {min})", min = crate::dataset::MIN_ITEMS)]
    DatasetTooSmall(usize),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn format(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            context: context.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
