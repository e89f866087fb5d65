use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("build error: {0}")]
    Build(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("window too small: {0}")]
    Window(String),
    #[error("invalid representation: {0}")]
    Rep(String),
    #[error("invalid morphism: {0}")]
    Morphism(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
