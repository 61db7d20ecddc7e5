//! Delay statistics: empirical CDFs, sample-size calculators and the
//! equality test used to separate and merge states.

mod ecdf;
mod equality;
pub mod gamma;
mod sample_size;

pub use ecdf::{ks_two_sample, Ecdf};
pub use equality::{means_equal, EqualityTest, EqualityTestConfig};
pub use sample_size::{
    dkw_epsilon, equality_bound_from_k, epsilon_for_k, relative_error_coverage, sample_size_exact,
    sample_size_normal,
};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
