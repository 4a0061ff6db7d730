use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] robloc::Error),
}

impl BenchError {
    /// 2 config/IO, 3 numeric or domain, 4 capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Io(_) | BenchError::Csv(_) => 2,
            BenchError::Core(e) if e.is_capacity() => 4,
            BenchError::Core(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub fn config(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}
