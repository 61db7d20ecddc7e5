//! Observation-table learning: plain L* and the k-fold sampling baseline.

mod log;
mod lstar;
mod sampling;
pub mod tree;

pub use log::{Run, SampleLog, TransitionSamples};
pub use lstar::{learn_with_table, lstar_learn, LearnOutcome, ObservationTable, TableConfig};
pub use sampling::{sampling_lstar_learn, SamplingOptions, SamplingOutcome};
