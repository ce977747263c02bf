use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    Numeric(String),

    #[error("training diverged at epoch {epoch} (loss = {loss})")]
    Diverged { epoch: usize, loss: f64 },

    #[error("pretraining stage {stage} failed: {source}")]
    Stage { stage: usize, source: Box<Error> },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("{} cell(s) not covered by any patch, first {:?}", .0.len(), .0.first())]
    Coverage(Vec<(usize, usize)>),

    #[error("assembly failed: {0}")]
    Assembly(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// True for errors that come from numerical breakdown rather than bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Numeric(_) | Error::Diverged { .. } => true,
            Error::Stage { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
