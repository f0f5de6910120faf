use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("input error: {0}")]
    Input(String),
    #[error("refused: {0}")]
    Refusal(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Refusal(_) => 1,
            Error::Syntax { .. } | Error::Input(_) => 2,
            Error::Consistency(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn refuse<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Refusal(msg.into()))
}

pub(crate) fn inconsistent<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Consistency(msg.into()))
}
