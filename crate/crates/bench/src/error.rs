use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] spbcd::Error),
    #[error("solver failed after {passes} pass(es), partial trace in {}: {source}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "memory".into()))]
    Solver {
        passes: usize,
        path: Option<PathBuf>,
        #[source]
        source: spbcd::Error,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    /// Process exit status: 2 for anything wrong with the request, 3 when
    /// the solver itself failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Solver { .. } => 3,
            BenchError::Core(spbcd::Error::Numeric(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(BenchError::Config(msg.into()))
}
