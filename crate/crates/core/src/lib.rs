//! Low-rank matrix recovery: measurement ensembles, nuclear-norm decoding,
//! dual certificates and the concentration inequalities behind them.

pub mod concentration;
pub mod error;
pub mod linalg;
pub mod nets;
pub mod prob;
pub mod recovery;
pub mod sensing;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
