//! Merging delay-equivalent states of a sampled expansion.

use std::collections::VecDeque;

use crate::automata::{io_partition, MealyMachine, StateId, Word};
use crate::error::Result;
use crate::expansion::ExpandedMachine;
use crate::learner::TransitionSamples;
use crate::mdm::{DelayModel, MealyDelayMachine};
use crate::stats::{mean, EqualityTest};

/// A machine together with the delay samples collected on each transition.
#[derive(Clone, Debug)]
pub struct SampledMdm {
    machine: MealyMachine,
    samples: TransitionSamples,
    /// Transitions that are not compared while merging.
    skipped: Vec<bool>,
    /// Transitions sharing an id may lend each other samples when a merged
    /// transition ends up with none of its own.
    group: Vec<usize>,
}

impl SampledMdm {
    pub fn new(machine: MealyMachine, samples: TransitionSamples) -> Self {
        let n = machine.num_transitions();
        assert_eq!(samples.len(), n);
        Self {
            machine,
            samples,
            skipped: vec![false; n],
            group: (0..n).collect(),
        }
    }

    /// Samples attributed to an expansion. With `relax_self_loops`, copies of
    /// minimal self-loops are left out of the comparisons and pooled.
    pub fn from_expansion(mx: &ExpandedMachine, samples: TransitionSamples, relax_self_loops: bool) -> Self {
        let mut out = Self::new(mx.machine().clone(), samples);
        let n = out.machine.num_transitions();
        out.group = (0..n).map(|t| n + mx.minimal_transition(t)).collect();
        if relax_self_loops {
            out.skipped = (0..n).map(|t| mx.is_self_loop(t)).collect();
        }
        out
    }

    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }

    pub fn samples(&self) -> &TransitionSamples {
        &self.samples
    }
}

#[derive(Clone, Debug)]
pub struct MergeOutcome {
    /// Merged machine with pooled empirical delays.
    pub mdm: MealyDelayMachine,
    /// Exponential rate fitted to each merged transition (1 / pooled mean).
    pub rates: Vec<f64>,
    /// Merged state of every state of the input machine.
    pub state_map: Vec<StateId>,
    pub test: EqualityTest,
}

impl MergeOutcome {
    pub fn machine(&self) -> &MealyMachine {
        self.mdm.machine()
    }

    /// Shortest word leading both `s` and `t` to a transition pair whose
    /// pooled samples the test rejects, or `None` if there is none.
    pub fn witness(&self, s: StateId, t: StateId) -> Option<Word> {
        let m = self.mdm.machine();
        let k = m.num_inputs();
        let n = m.num_states();
        let mut seen = vec![false; n * n];
        let mut queue = VecDeque::from([(s, t, Vec::new())]);
        seen[s * n + t] = true;
        while let Some((a, b, w)) = queue.pop_front() {
            for i in 0..k {
                let (da, db) = (self.mdm.delay(a, i), self.mdm.delay(b, i));
                if let (DelayModel::Empirical { samples: x }, DelayModel::Empirical { samples: y }) = (da, db) {
                    if a != b && !self.test.equal(x, y).unwrap_or(true) {
                        let mut w = w.clone();
                        w.push(i);
                        return Some(w);
                    }
                }
                let (na, nb) = (m.next(a, i), m.next(b, i));
                if !seen[na * n + nb] {
                    seen[na * n + nb] = true;
                    let mut w = w.clone();
                    w.push(i);
                    queue.push_back((na, nb, w));
                }
            }
        }
        None
    }
}

/// Splits the IO-equivalence classes of `dx` until every pair of states in a
/// block agrees on successor blocks and passes `test` on every compared
/// transition. A block is never kept together across a failing pair.
pub fn merge_states(dx: &SampledMdm, test: EqualityTest) -> Result<MergeOutcome> {
    let m = &dx.machine;
    let n = m.num_states();
    let k = m.num_inputs();
    let means: Vec<Option<f64>> = (0..m.num_transitions())
        .map(|t| {
            let x = dx.samples.get(t);
            (!x.is_empty()).then(|| mean(x))
        })
        .collect();
    let compatible = |s: StateId, u: StateId, block: &[usize]| -> bool {
        (0..k).all(|i| {
            if block[m.next(s, i)] != block[m.next(u, i)] {
                return false;
            }
            let (ts, tu) = (m.transition_index(s, i), m.transition_index(u, i));
            if dx.skipped[ts] || dx.skipped[tu] {
                return true;
            }
            match (means[ts], means[tu]) {
                (Some(ms), Some(mu)) => test
                    .equal_with_means(dx.samples.get(ts), ms, dx.samples.get(tu), mu)
                    .unwrap_or(true),
                _ => true,
            }
        })
    };

    let mut block = io_partition(m);
    loop {
        let blocks = block.iter().copied().max().map_or(0, |b| b + 1);
        let mut members: Vec<Vec<StateId>> = vec![Vec::new(); blocks];
        for s in 0..n {
            members[block[s]].push(s);
        }
        let mut next = vec![usize::MAX; n];
        let mut count = 0;
        for group in &members {
            let mut parts: Vec<Vec<StateId>> = Vec::new();
            for &s in group {
                match parts.iter_mut().find(|p| p.iter().all(|&u| compatible(s, u, &block))) {
                    Some(p) => p.push(s),
                    None => parts.push(vec![s]),
                }
            }
            for p in parts {
                for s in p {
                    next[s] = count;
                }
                count += 1;
            }
        }
        if count == blocks {
            break;
        }
        block = next;
    }

    let merged = m.quotient_by(&block);
    let access = m.access_words();
    let state_map: Vec<StateId> = (0..n).map(|s| merged.state_after(merged.initial(), &access[s])).collect();
    let nt = merged.num_transitions();
    let mut pooled: Vec<Vec<f64>> = vec![Vec::new(); nt];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); nt];
    for s in 0..n {
        for i in 0..k {
            let t = m.transition_index(s, i);
            let target = merged.transition_index(state_map[s], i);
            pooled[target].extend_from_slice(dx.samples.get(t));
            groups[target].push(dx.group[t]);
        }
    }
    let mut delays = Vec::with_capacity(nt);
    let mut rates = Vec::with_capacity(nt);
    for (t, samples) in pooled.into_iter().enumerate() {
        let samples = if samples.is_empty() {
            // Relaxed self-loop copies without own samples borrow from
            // every copy of the same underlying transition.
            (0..m.num_transitions())
                .filter(|&u| groups[t].contains(&dx.group[u]))
                .flat_map(|u| dx.samples.get(u).iter().copied())
                .collect()
        } else {
            samples
        };
        rates.push(if samples.is_empty() { f64::NAN } else { 1.0 / mean(&samples) });
        delays.push(DelayModel::empirical(samples)?);
    }
    Ok(MergeOutcome {
        mdm: MealyDelayMachine::new(merged, delays)?,
        rates,
        state_map,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{io_equivalent, minimize};
    use crate::expansion::{expand, ExpansionOptions};
    use crate::mdm::{expand_ground_truth, GroundTruthOptions, Simulator, SystemUnderLearning};
    use crate::models;
    use crate::stats::EqualityTestConfig;
    use std::sync::Arc;

    /// Samples every transition of `mx` `k` times by replaying access words
    /// on the ground truth.
    fn sample(mx: &ExpandedMachine, truth: MealyDelayMachine, k: usize, seed: u64) -> TransitionSamples {
        let m = mx.machine();
        let mut sim = Simulator::new(Arc::new(truth), seed);
        let access = m.access_words();
        let mut out = TransitionSamples::new(m.num_transitions());
        for s in 0..m.num_states() {
            for i in 0..m.num_inputs() {
                for _ in 0..k {
                    sim.reset().unwrap();
                    for &a in &access[s] {
                        sim.step(a).unwrap();
                    }
                    out.push(m.transition_index(s, i), sim.step(i).unwrap().1);
                }
            }
        }
        out
    }

    fn m1_truth(rates: &[f64]) -> MealyDelayMachine {
        let m = models::test_m1();
        let delays = (0..m.num_transitions()).map(|t| DelayModel::exponential(rates[t]).unwrap()).collect();
        MealyDelayMachine::new(m, delays).unwrap()
    }

    const LADDER: [f64; 10] = [0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4, 12.8, 25.6, 51.2];

    #[test]
    fn separated_rates_give_five_states() {
        let mx = expand(&models::m_prime(), 2, ExpansionOptions::default()).unwrap();
        let samples = sample(&mx, m1_truth(&LADDER), 1000, 3);
        let out = merge_states(&SampledMdm::new(mx.machine().clone(), samples), EqualityTest::default()).unwrap();
        assert_eq!(out.machine().num_states(), 5);
        assert!(io_equivalent(out.machine(), mx.machine()).unwrap().is_none());
        let truth = models::test_m1();
        let pairs = crate::automata::find_injective_bisimulation(out.machine(), &truth).unwrap().unwrap();
        for (a, b) in pairs {
            for i in 0..2 {
                let want = LADDER[truth.transition_index(b, i)];
                let got = out.rates[out.machine().transition_index(a, i)];
                assert!((got - want).abs() / want < 0.2, "{got} vs {want}");
            }
        }
        let class = io_partition(out.machine());
        for a in 0..5 {
            for b in 0..5 {
                if a != b && class[a] == class[b] {
                    let w = out.witness(a, b).expect("distinct merged states are separated");
                    assert!(w.len() <= 2);
                }
            }
        }
    }

    #[test]
    fn equal_rates_collapse_to_minimal() {
        let mx = expand(&models::m_prime(), 2, ExpansionOptions::default()).unwrap();
        let samples = sample(&mx, m1_truth(&[1.0; 10]), 1000, 4);
        let out = merge_states(&SampledMdm::new(mx.machine().clone(), samples), EqualityTest::default()).unwrap();
        assert_eq!(out.machine().num_states(), 3);
    }

    #[test]
    fn minimal_ground_truth_merges_back() {
        let min = models::m_prime();
        for d in 0..=3 {
            let truth = crate::mdm::make_random_mdm(&min, d as u64, (0.1, 10.0));
            let mx = expand(&min, d, ExpansionOptions::default()).unwrap();
            let samples = sample(&mx, truth, 800, 9);
            let out = merge_states(&SampledMdm::new(mx.machine().clone(), samples), EqualityTest::default()).unwrap();
            assert_eq!(out.machine().num_states(), 3, "d={d}");
        }
    }

    #[test]
    fn threshold_extremes() {
        let min = models::m_prime();
        let mx = expand(&min, 2, ExpansionOptions::default()).unwrap();
        let truth = expand_ground_truth(&min, 2, 1, GroundTruthOptions::default()).unwrap();
        let dx = SampledMdm::new(mx.machine().clone(), sample(&mx, truth, 5, 2));
        let all = merge_states(&dx, EqualityTest::always_equal()).unwrap();
        assert!(crate::automata::is_isomorphic(all.machine(), &minimize(mx.machine())));
        let none = merge_states(&dx, EqualityTest::never_equal()).unwrap();
        assert_eq!(none.machine().num_states(), mx.num_states());
    }

    #[test]
    fn relaxed_self_loops_are_pooled() {
        let m = crate::automata::machine_from_rows(
            &["a", "b"],
            &[("r", "a", "x", "p"), ("r", "b", "y", "z"), ("p", "a", "x", "z"), ("p", "b", "y", "r"), ("z", "a", "e", "z"), ("z", "b", "e", "z")],
        )
        .unwrap();
        let mx = expand(&m, 2, ExpansionOptions::default()).unwrap();
        let mut samples = TransitionSamples::new(mx.machine().num_transitions());
        let loops: Vec<usize> = (0..samples.len()).filter(|&t| mx.is_self_loop(t)).collect();
        for t in 0..samples.len() {
            if !mx.is_self_loop(t) {
                for _ in 0..10 {
                    samples.push(t, 1.0);
                }
            }
        }
        // Only one copy of each sink loop carries samples, with a different mean.
        samples.push(loops[0], 5.0);
        samples.push(loops[1], 7.0);
        let dx = SampledMdm::from_expansion(&mx, samples, true);
        let cfg = EqualityTest::Means(EqualityTestConfig::default());
        let out = merge_states(&dx, cfg).unwrap();
        assert_eq!(out.machine().num_states(), 3);
        for x in 0..out.machine().num_states() {
            for i in 0..2 {
                if out.machine().next(x, i) == x {
                    assert!(!out.mdm.delay(x, i).mean().is_nan());
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let min = models::m_prime();
        let mx = expand(&min, 2, ExpansionOptions::default()).unwrap();
        let truth = expand_ground_truth(&min, 2, 8, GroundTruthOptions::default()).unwrap();
        let dx = SampledMdm::new(mx.machine().clone(), sample(&mx, truth, 200, 2));
        let a = merge_states(&dx, EqualityTest::default()).unwrap();
        let b = merge_states(&dx, EqualityTest::default()).unwrap();
        assert_eq!(a.state_map, b.state_map);
        assert_eq!(a.rates, b.rates);
    }
}
