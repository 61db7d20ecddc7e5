use super::gamma::{gamma_p, normal_quantile};
use crate::error::{Error, Result};

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Uniform ECDF deviation that `k` samples stay within with probability
/// `1 - delta` (DKW inequality).
pub fn dkw_epsilon(k: u64, delta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    check_unit("delta", delta)?;
    Ok(((2.0 / delta).ln() / (2.0 * k as f64)).sqrt())
}

/// Probability that the mean of `k` exponential samples lies within a
/// relative error of `eps` of the true mean. The normalized mean follows
/// Gamma(k, k).
pub fn relative_error_coverage(k: u64, eps: f64) -> f64 {
    let k = k as f64;
    gamma_p(k, k * (1.0 + eps)) - gamma_p(k, k * (1.0 - eps))
}

/// Smallest `k` whose coverage for relative error `eps` reaches `1 - delta`.
pub fn sample_size_exact(eps: f64, delta: f64) -> Result<u64> {
    check_unit("eps", eps)?;
    check_unit("delta", delta)?;
    let target = 1.0 - delta;
    if relative_error_coverage(1, eps) >= target {
        return Ok(1);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while relative_error_coverage(hi, eps) < target {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if relative_error_coverage(mid, eps) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Normal approximation `ceil((z_{1-delta/2} / eps)^2)`.
pub fn sample_size_normal(eps: f64, delta: f64) -> Result<u64> {
    check_unit("eps", eps)?;
    check_unit("delta", delta)?;
    let z = normal_quantile(1.0 - delta / 2.0);
    Ok((z / eps).powi(2).ceil() as u64)
}

/// Relative error reached with probability `1 - delta` by `k` samples.
pub fn epsilon_for_k(k: u64, delta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    check_unit("delta", delta)?;
    let target = 1.0 - delta;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if relative_error_coverage(k, hi) < target {
        return Ok(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if relative_error_coverage(k, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(hi)
}

/// Relative deviation two estimates from `k` samples each may show while
/// both are within `eps`: `(1 + eps) / (1 - eps) - 1`.
pub fn equality_bound_from_k(k: u64, delta: f64) -> Result<f64> {
    let eps = epsilon_for_k(k, delta)?;
    Ok((1.0 + eps) / (1.0 - eps) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dkw_plug_in() {
        let delta = 2.0 * (-2.0f64).exp();
        assert!((dkw_epsilon(1, delta).unwrap() - 1.0).abs() < 1e-12);
        assert!(dkw_epsilon(738, 0.05).unwrap() <= 0.05);
        assert!(dkw_epsilon(737, 0.05).unwrap() > 0.05);
        let mut last = f64::INFINITY;
        for k in [1, 10, 100, 10_000, 1_000_000] {
            let e = dkw_epsilon(k, 0.01).unwrap();
            assert!(e < last);
            last = e;
        }
        assert!(last < 0.002);
        assert!(dkw_epsilon(0, 0.1).is_err());
        assert!(dkw_epsilon(10, 1.0).is_err());
    }

    #[test]
    fn exact_sample_size_near_thousand() {
        let k = sample_size_exact(0.081, 0.01).unwrap();
        assert!((950..=1050).contains(&k), "{k}");
        assert!(relative_error_coverage(k, 0.081) >= 0.99);
        assert!(relative_error_coverage(k - 1, 0.081) < 0.99);
        assert!(sample_size_exact(0.5, 0.5).unwrap() <= 10);
    }

    #[test]
    fn normal_sample_size() {
        let k = sample_size_normal(0.081, 0.01).unwrap();
        assert!((1010..=1013).contains(&k), "{k}");
        assert_eq!(sample_size_normal(0.1, 0.3174).unwrap(), 100);
    }

    #[test]
    fn calculators_agree_in_normal_regime() {
        for &eps in &[0.1, 0.05, 0.03] {
            for &delta in &[0.05, 0.01, 0.001] {
                let a = sample_size_exact(eps, delta).unwrap() as f64;
                let b = sample_size_normal(eps, delta).unwrap() as f64;
                assert!((a - b).abs() / a < 0.1, "eps={eps} delta={delta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn monotone_in_eps_and_delta() {
        let mut last = 0;
        for &eps in &[0.5, 0.3, 0.2, 0.1, 0.05] {
            let k = sample_size_exact(eps, 0.05).unwrap();
            assert!(k >= last);
            last = k;
        }
        let mut last = 0;
        for &delta in &[0.5, 0.2, 0.05, 0.01, 0.001] {
            let k = sample_size_normal(0.1, delta).unwrap();
            assert!(k >= last);
            last = k;
        }
    }

    #[test]
    fn equality_bound_examples() {
        let b1000 = equality_bound_from_k(1000, 0.01).unwrap();
        assert!((b1000 - 0.177).abs() < 0.01, "{b1000}");
        let b250 = equality_bound_from_k(250, 0.01).unwrap();
        assert!((b250 / b1000 - 2.0).abs() / 2.0 < 0.15);
        assert!(equality_bound_from_k(10_000_000, 0.01).unwrap() < 0.003);
    }
}
