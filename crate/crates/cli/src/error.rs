use cvfid_core::CoreError;

/// Errors surfaced by the command-line layer, each mapped to a stable exit
/// code: state-file problems exit 3, numerical-consistency failures exit 4,
/// everything else exits 1 (clap usage errors exit 2 on their own).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid state file {path}: {reason}")]
    StateFile { path: String, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cutoff insufficient at n_max {n_max}: trace deficit {deficit:.3e}; raise the cutoff")]
    Cutoff { n_max: usize, deficit: f64 },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::StateFile { .. } => 3,
            CliError::Core(CoreError::NumericalConsistency(_)) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
