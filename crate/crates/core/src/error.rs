use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in the cyclotomic field")]
    ZeroInverse,

    #[error("non-invertible Laurent polynomial: {0}")]
    NonUnit(String),

    #[error("mixed alphabets: cannot combine `{left}` with `{right}`")]
    MixedAlphabet { left: String, right: String },

    #[error("inhomogeneous element: `{first}` has grade {first_grade}, `{second}` has grade {second_grade}")]
    Inhomogeneous {
        first: String,
        first_grade: u8,
        second: String,
        second_grade: u8,
    },

    #[error("tensor arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("letter `{letter}` is not in the alphabet of rewrite system `{system}`")]
    UnknownLetter { letter: String, system: String },

    #[error("rule `{lhs}` is not decreasing: right-hand word `{word}` is not smaller")]
    RuleNotDecreasing { lhs: String, word: String },

    #[error("duplicate rule for `{0}`")]
    DuplicateRule(String),

    #[error("normalization exceeded {steps} rewrite steps; trace: {trace}")]
    NonTermination { steps: usize, trace: String },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0}")]
    Unsupported(String),

    #[error("rule table: {0}")]
    RuleTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
