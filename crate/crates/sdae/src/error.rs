use std::io;
use std::path::{Path, PathBuf};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: malformed file: {reason}", path.display())]
    Format { path: PathBuf, reason: String },

    #[error("missing artifacts: {}", list_paths(.0))]
    Missing(Vec<PathBuf>),

    #[error("{context}: {source}")]
    Core { context: String, source: sdae_core::Error },
}

fn list_paths(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Error::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn format(path: impl AsRef<Path>, reason: impl Into<String>) -> Self {
        Error::Format { path: path.as_ref().to_path_buf(), reason: reason.into() }
    }

    pub fn core(context: impl Into<String>, source: sdae_core::Error) -> Self {
        Error::Core { context: context.into(), source }
    }

    /// Process exit code: 2 config, 3 numeric divergence, 4 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } | Error::Format { .. } | Error::Missing(_) => 4,
            Error::Core { source, .. } if source.is_numeric() => 3,
            Error::Core { .. } => 2,
        }
    }
}

/// Attaches a context string to core results.
pub(crate) trait CoreContext<T> {
    fn context(self, what: impl Into<String>) -> Result<T>;
}

impl<T> CoreContext<T> for sdae_core::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T> {
        self.map_err(|e| Error::core(what, e))
    }
}
