pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod datasets;
pub mod embedding;
pub mod evaluation;
mod error;
pub mod math;
pub mod params;
pub mod rng;
pub mod rnn;
pub mod tracenet;
pub mod training;

pub use error::{Error, Result};
