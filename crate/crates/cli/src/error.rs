use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] maxprec::Error),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Parameter(String),

    #[error("cannot write output: {0}")]
    Write(String),
}

impl CliError {
    /// Process exit status: 2 input, 3 parameters, 4 numerical budget.
    pub fn exit_code(&self) -> i32 {
        use maxprec::Error as E;
        match self {
            CliError::Core(E::Input(_)) | CliError::Read { .. } | CliError::Input(_) | CliError::Write(_) => 2,
            CliError::Core(E::InvalidParameter(_) | E::Domain(_)) | CliError::Parameter(_) => 3,
            CliError::Core(E::Budget { .. } | E::Cancellation { .. }) => 4,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Write(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Write(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Write(e.to_string())
    }
}
