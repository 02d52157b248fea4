use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("channel realization stayed degenerate after {attempts} draws")]
    DegenerateChannel { attempts: usize },

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}
