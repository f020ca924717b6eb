//! Located/unlocated error-correctability bounds for nondegenerate quantum
//! codes, with exact Knill-Laflamme checks on small stabilizer codes and
//! Monte-Carlo maximum-likelihood decoding of concatenated codes.

pub mod bounds;
pub mod cli;
pub mod decoder;
pub mod error;
pub mod montecarlo;
pub mod stabilizer;

pub use error::{Error, Result};
