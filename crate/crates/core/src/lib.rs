pub mod beta;
pub mod cover;
pub mod csp;
pub mod decomposition;
pub mod error;
pub mod exec;
pub mod generate;
pub mod graph;
pub mod hypergraph;
pub mod mim;
pub mod solver;

pub use error::{Error, Result};
