use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration; `key` is the dotted path of the offending key.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{task}: {source}")]
    Task {
        task: String,
        #[source]
        source: randopt::Error,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

/// Attaches task context to core errors.
pub(crate) trait TaskContext<T> {
    fn task(self, task: impl FnOnce() -> String) -> Result<T>;
}

impl<T> TaskContext<T> for randopt::Result<T> {
    fn task(self, task: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| CliError::Task { task: task(), source })
    }
}
