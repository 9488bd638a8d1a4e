use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure at {at}: {source}")]
    Numeric {
        at: String,
        #[source]
        source: toric_zeros::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn numeric(at: impl Into<String>, source: toric_zeros::Error) -> Self {
        CliError::Numeric { at: at.into(), source }
    }
}
