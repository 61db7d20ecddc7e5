use super::{ks_two_sample, mean};
use crate::error::{Error, Result};

/// Two means count as different only if they deviate by more than `rel_tol`
/// relative to the larger magnitude and by at least `abs_tol` absolutely.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EqualityTestConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for EqualityTestConfig {
    fn default() -> Self {
        Self {
            rel_tol: 0.20,
            abs_tol: 0.01,
        }
    }
}

impl EqualityTestConfig {
    pub fn equal_means(&self, ma: f64, mb: f64) -> bool {
        let diff = (ma - mb).abs();
        let scale = ma.abs().max(mb.abs());
        let different = diff > self.rel_tol * scale && diff >= self.abs_tol;
        !different
    }
}

pub fn means_equal(a: &[f64], b: &[f64], cfg: &EqualityTestConfig) -> Result<bool> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("equality test on an empty sample set".into()));
    }
    Ok(cfg.equal_means(mean(a), mean(b)))
}

/// Distribution-equality test used for state separation and merging.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EqualityTest {
    Means(EqualityTestConfig),
    /// Two-sample Kolmogorov-Smirnov; equal unless p < alpha.
    Ks { alpha: f64 },
}

impl Default for EqualityTest {
    fn default() -> Self {
        EqualityTest::Means(EqualityTestConfig::default())
    }
}

impl EqualityTest {
    /// Accepts every pair.
    pub fn always_equal() -> Self {
        EqualityTest::Means(EqualityTestConfig {
            rel_tol: f64::INFINITY,
            abs_tol: f64::INFINITY,
        })
    }

    /// Rejects every pair with distinct means.
    pub fn never_equal() -> Self {
        EqualityTest::Means(EqualityTestConfig {
            rel_tol: 0.0,
            abs_tol: 0.0,
        })
    }

    pub fn equal(&self, a: &[f64], b: &[f64]) -> Result<bool> {
        match self {
            EqualityTest::Means(cfg) => means_equal(a, b, cfg),
            EqualityTest::Ks { alpha } => Ok(ks_two_sample(a, b)?.1 >= *alpha),
        }
    }

    /// Same as [`equal`](Self::equal) but reuses precomputed means where the
    /// test only looks at means.
    pub fn equal_with_means(&self, a: &[f64], ma: f64, b: &[f64], mb: f64) -> Result<bool> {
        match self {
            EqualityTest::Means(cfg) => {
                if a.is_empty() || b.is_empty() {
                    return Err(Error::InvalidArgument("equality test on an empty sample set".into()));
                }
                Ok(cfg.equal_means(ma, mb))
            }
            EqualityTest::Ks { .. } => self.equal(a, b),
        }
    }
}
