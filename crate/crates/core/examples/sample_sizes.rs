//! How many delay samples per transition a given accuracy needs.

use delaylearn::stats::{dkw_epsilon, equality_bound_from_k, sample_size_exact, sample_size_normal};

fn main() -> delaylearn::Result<()> {
    println!("  eps  delta  exact  normal");
    for (eps, delta) in [(0.2, 0.05), (0.1, 0.01), (0.081, 0.01), (0.05, 0.01)] {
        println!(
            "{eps:>5} {delta:>6} {:>6} {:>7}",
            sample_size_exact(eps, delta)?,
            sample_size_normal(eps, delta)?
        );
    }
    for k in [100, 1000, 10_000] {
        println!(
            "k={k:>5}: ECDF within {:.4}, equality tolerance {:.4}",
            dkw_epsilon(k, 0.01)?,
            equality_bound_from_k(k, 0.01)?
        );
    }
    Ok(())
}
