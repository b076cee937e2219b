use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("query time {t} s is outside the covered span [{start}, {end}] s")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("simulation diverged at tick {tick} (t = {time} s, theta = {theta} rad)")]
    Divergence { tick: usize, time: f64, theta: f64 },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("override: {0}")]
    Override(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
