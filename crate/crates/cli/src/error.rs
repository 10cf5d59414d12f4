use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Model { field: String, message: String },
    #[error("{}: {inner}", path.display())]
    InFile { path: PathBuf, inner: Box<CliError> },
    #[error(transparent)]
    Core(#[from] edr_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn in_file(self, path: &Path) -> Self {
        CliError::InFile { path: path.to_path_buf(), inner: Box::new(self) }
    }
}
