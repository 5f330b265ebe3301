//! Exact symbolic engine for the Z₃-graded differential calculus on the
//! quantum plane.

pub mod calculus;
pub mod cli;
pub mod dual;
pub mod error;
pub mod freealg;
pub mod hopf;
pub mod lie;
pub mod parse;
pub mod report;
pub mod rewrite;
pub mod scalars;

pub use error::{Error, Result};
pub use freealg::{Element, Gen, TensorElement, TensorRule, Word};
pub use scalars::{Cyclo, QMode, Scalar};
