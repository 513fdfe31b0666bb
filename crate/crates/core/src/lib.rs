pub mod automata;
pub mod cli;
pub mod del;
pub mod error;
pub mod formula;
pub mod gen;
pub mod planner;
pub mod protocol;
pub mod regular;
pub mod sat;
pub mod scenario;

pub use error::{Error, Result};
