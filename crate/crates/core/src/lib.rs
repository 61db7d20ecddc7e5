pub mod automata;
pub mod coverage;
pub mod error;
pub mod expansion;
pub mod learner;
pub mod merging;
pub mod mdm;
pub mod models;
pub mod oracles;
pub mod pipeline;
pub mod stats;

pub use error::{Error, Result};
