use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] nlmg::Error),

    #[error("no suites selected")]
    NoSuites,

    #[error("N = {n} exceeds the dense validation cap of {cap}")]
    AboveCap { n: usize, cap: usize },

    #[error("malformed CSV: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
