use ssr_core::SsrError;

/// Harness-level failure, partitioned by the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Bad configuration: malformed JSON, unknown keys, invalid values. Exit 2.
    #[error("config error: {0}")]
    Config(String),
    /// Bad data or IO: unreadable files, parse failures, schema drift. Exit 3.
    #[error("data error: {0}")]
    Data(String),
    /// Numerical breakdown during a run. Exit 4.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Data(_) => 3,
            HarnessError::Numerical(_) => 4,
        }
    }

    /// Core errors raised while validating or constructing from config.
    pub fn from_config(e: SsrError) -> Self {
        HarnessError::Config(e.to_string())
    }

    /// Core errors raised while reading or parsing data files.
    pub fn from_data(e: SsrError) -> Self {
        HarnessError::Data(e.to_string())
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
