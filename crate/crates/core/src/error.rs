use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator a{gen} is outside the alphabet a1..a{rank}")]
    GeneratorOutOfRange { gen: usize, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("monomial {0} lies outside the declared exponent box")]
    OutsideBox(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("words are conjugate in the free group; no level can separate them")]
    Conjugate,

    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },
}
