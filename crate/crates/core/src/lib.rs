//! Exact one-dimensional transmission probabilities and rigorous `T ≥ sech²θ`
//! lower bounds for barrier potentials, in units `2m = ħ = 1`.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod millergood;
pub mod numerics;
pub mod optimize;
pub mod profiles;
pub mod solver;

pub use error::{Error, Result};
