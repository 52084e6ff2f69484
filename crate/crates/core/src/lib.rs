pub mod cli;
pub mod error;
pub mod exact;
pub mod expr;
pub mod functions;
pub mod matcore;
pub mod monotone;
pub mod report;
pub mod rng;
pub mod search;
pub mod ssa;

pub use error::{Error, Result};
