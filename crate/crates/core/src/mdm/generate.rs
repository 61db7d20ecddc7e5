use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DelayModel, MealyDelayMachine};
use crate::automata::MealyMachine;
use crate::error::Result;
use crate::expansion::{expand, ExpansionOptions};

pub const DEFAULT_RATE_RANGE: (f64, f64) = (0.1, 10.0);

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Attaches exponential delays with log-uniform rates from `rate_range`.
pub fn make_random_mdm(m: &MealyMachine, seed: u64, rate_range: (f64, f64)) -> MealyDelayMachine {
    assert!(
        rate_range.0 > 0.0 && rate_range.0 <= rate_range.1,
        "rate range must be positive and ordered"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delays = (0..m.num_transitions())
        .map(|_| DelayModel::Exponential {
            rate: log_uniform(&mut rng, rate_range),
        })
        .collect();
    MealyDelayMachine::new(m.clone(), delays).expect("one model per transition")
}

#[derive(Clone, Copy, Debug)]
pub struct GroundTruthOptions {
    pub expansion: ExpansionOptions,
    pub rate_range: (f64, f64),
}

impl Default for GroundTruthOptions {
    fn default() -> Self {
        Self {
            expansion: ExpansionOptions::default(),
            rate_range: DEFAULT_RATE_RANGE,
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Random stutter-free, `d`-step confluent ground truth whose minimal machine
/// is `m_min`: the depth-`d` expansion with a random set of copies merged back
/// (closed under successors), then random exponential delays.
pub fn expand_ground_truth(
    m_min: &MealyMachine,
    d: usize,
    seed: u64,
    opts: GroundTruthOptions,
) -> Result<MealyDelayMachine> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mx = expand(m_min, d, opts.expansion)?;
    let m = mx.machine();
    let n = m.num_states();
    let mut parent: Vec<usize> = (0..n).collect();
    let merges = rng.gen_range(0..=n);
    for _ in 0..merges {
        let x = rng.gen_range(0..n);
        let peers: Vec<usize> = (0..n).filter(|&y| y != x && mx.base(y) == mx.base(x)).collect();
        if peers.is_empty() {
            continue;
        }
        let y = peers[rng.gen_range(0..peers.len())];
        // Union plus congruence closure.
        let mut pending = vec![(x, y)];
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                continue;
            }
            parent[ra.max(rb)] = ra.min(rb);
            for i in 0..m.num_inputs() {
                pending.push((m.next(a, i), m.next(b, i)));
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    let mut block = vec![usize::MAX; n];
    let mut next = 0;
    let block_of: Vec<usize> = roots
        .iter()
        .map(|&r| {
            if block[r] == usize::MAX {
                block[r] = next;
                next += 1;
            }
            block[r]
        })
        .collect();
    let q = m.quotient_by(&block_of);
    Ok(make_random_mdm(&q, rng.gen(), opts.rate_range))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{io_equivalent, is_isomorphic, minimize};
    use crate::mdm::{is_d_step_confluent, is_stutter_free};
    use crate::models;

    #[test]
    fn same_seed_same_rates() {
        let m = models::test_m1();
        assert_eq!(make_random_mdm(&m, 5, DEFAULT_RATE_RANGE), make_random_mdm(&m, 5, DEFAULT_RATE_RANGE));
    }

    #[test]
    fn degenerate_range() {
        let mdm = make_random_mdm(&models::test_m1(), 5, (1.0, 1.0));
        assert!(mdm.delays().iter().all(|d| *d == DelayModel::Exponential { rate: 1.0 }));
    }

    #[test]
    fn default_range_bounds() {
        let m = models::m_prime();
        for seed in 0..2000 {
            for d in make_random_mdm(&m, seed, DEFAULT_RATE_RANGE).delays() {
                let DelayModel::Exponential { rate } = d else { unreachable!() };
                assert!((0.1..=10.0).contains(rate));
            }
        }
    }

    #[test]
    fn ground_truths_satisfy_assumptions() {
        let m = models::m_prime();
        for d in 0..4 {
            for seed in 0..50 {
                let g = expand_ground_truth(&m, d, seed, GroundTruthOptions::default()).unwrap();
                assert!(is_stutter_free(g.machine()));
                assert!(is_d_step_confluent(g.machine(), d));
                assert!(io_equivalent(g.machine(), &m).unwrap().is_none());
                if d == 0 {
                    assert!(is_isomorphic(g.machine(), &m));
                }
            }
        }
    }

    #[test]
    fn can_yield_test_m1() {
        let m = models::m_prime();
        let target = models::test_m1();
        let hit = (0..5000).any(|seed| {
            let g = expand_ground_truth(&m, 2, seed, GroundTruthOptions::default()).unwrap();
            is_isomorphic(g.machine(), &target)
        });
        assert!(hit);
        assert_eq!(minimize(&target).num_states(), 3);
    }
}
