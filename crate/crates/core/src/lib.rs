pub mod codec;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod objectives;
pub mod pareto;
pub mod qtable;
pub mod scalar;
pub mod variation;

pub use error::{Error, Result};
