use std::path::PathBuf;

/// Errors of the runner and the command line.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The configuration could not be parsed or names an unknown field.
    #[error("malformed configuration{}: {message}", source_label(.origin))]
    Config {
        origin: Option<PathBuf>,
        message: String,
    },

    /// The configuration parsed but describes an infeasible experiment.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", .path.display())]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] seqfront_core::Error),

    /// One or more self-check properties failed.
    #[error("{0} self-check properties failed")]
    CheckFailed(usize),
}

fn source_label(origin: &Option<PathBuf>) -> String {
    match origin {
        Some(p) => format!(" in {}", p.display()),
        None => String::new(),
    }
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            origin: None,
            message: message.into(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Infeasible(_) => 3,
            CliError::Core(e) if e.is_infeasible() => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
