//! History expansion of a minimal machine.
//!
//! Every state of the expansion is tagged with the minimal state it copies
//! (`base`) plus the last `d` non-looping inputs that led there and the state
//! they started from (`origin`). Shorter histories only occur for paths that
//! started at the root; those carry the root as origin. A self-loop of the
//! minimal machine never extends the history.

use std::collections::{HashMap, VecDeque};

use crate::automata::{io_equivalent, minimize, InputId, MealyMachine, StateId, Word};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExpansionOptions {
    /// Never split the root state; entering it forgets the history.
    pub unique_root: bool,
    /// Never split sink states (states whose inputs all loop).
    pub sink_ignorant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HistoryTag {
    pub base: StateId,
    pub origin: StateId,
    pub word: Word,
}

#[derive(Clone, Debug)]
pub struct ExpandedMachine {
    machine: MealyMachine,
    minimal: MealyMachine,
    tags: Vec<HistoryTag>,
    d: usize,
    opts: ExpansionOptions,
}

/// Worst-case state count of the expansion: `|S|·|I|^d + Σ_{j<d} |I|^j`.
pub fn size_bound(states: usize, inputs: usize, d: usize) -> u128 {
    let k = inputs as u128;
    let tree: u128 = (0..d as u32).map(|j| k.pow(j)).sum();
    states as u128 * k.pow(d as u32) + tree
}

fn is_sink(m: &MealyMachine, s: StateId) -> bool {
    (0..m.num_inputs()).all(|i| m.next(s, i) == s)
}

/// Builds the depth-`d` expansion of a minimal machine. Only tags reachable
/// from the root tag are created; states are numbered in BFS order.
pub fn expand(m_min: &MealyMachine, d: usize, opts: ExpansionOptions) -> Result<ExpandedMachine> {
    let min = minimize(m_min);
    if min.num_states() != m_min.num_states() {
        return Err(Error::NotMinimal {
            actual: m_min.num_states(),
            minimal: min.num_states(),
        });
    }
    let m = m_min;
    let k = m.num_inputs();
    let root_state = m.initial();
    let root = HistoryTag {
        base: root_state,
        origin: root_state,
        word: Vec::new(),
    };
    let successor = |tag: &HistoryTag, i: InputId| -> Option<HistoryTag> {
        let t = m.next(tag.base, i);
        if t == tag.base {
            return None;
        }
        if opts.sink_ignorant && is_sink(m, t) {
            return Some(HistoryTag {
                base: t,
                origin: t,
                word: Vec::new(),
            });
        }
        if opts.unique_root && t == root_state {
            return Some(root.clone());
        }
        if tag.word.len() < d {
            let mut word = tag.word.clone();
            word.push(i);
            return Some(HistoryTag {
                base: t,
                origin: tag.origin,
                word,
            });
        }
        if d == 0 {
            return Some(HistoryTag {
                base: t,
                origin: t,
                word: Vec::new(),
            });
        }
        let mut word = tag.word[1..].to_vec();
        word.push(i);
        Some(HistoryTag {
            base: t,
            origin: m.next(tag.origin, tag.word[0]),
            word,
        })
    };

    let mut index: HashMap<HistoryTag, usize> = HashMap::new();
    let mut tags = vec![root.clone()];
    index.insert(root.clone(), 0);
    let mut delta = Vec::new();
    let mut lambda = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for i in 0..k {
            let target = match successor(&tags[x], i) {
                None => x,
                Some(tag) => *index.entry(tag.clone()).or_insert_with(|| {
                    tags.push(tag);
                    queue.push_back(tags.len() - 1);
                    tags.len() - 1
                }),
            };
            delta.push(target);
            lambda.push(m.output(tags[x].base, i));
        }
    }
    // Rows were produced in dequeue order, which is also the state numbering.
    let names = tags.iter().map(|t| tag_name(m, t)).collect();
    let machine = MealyMachine::new(
        m.inputs().to_vec(),
        m.outputs().to_vec(),
        names,
        0,
        delta,
        lambda,
    )?;
    Ok(ExpandedMachine {
        machine,
        minimal: m.clone(),
        tags,
        d,
        opts,
    })
}

/// `s'{base}|{origin}|{word}` with minimal-state indices; ε marks the empty word.
fn tag_name(m: &MealyMachine, t: &HistoryTag) -> String {
    let word = if t.word.is_empty() {
        "ε".to_string()
    } else if t.word.iter().all(|&i| m.inputs()[i].chars().count() == 1) {
        t.word.iter().map(|&i| m.inputs()[i].as_str()).collect()
    } else {
        m.word_names(&t.word).join(",")
    };
    format!("s'{}|{}|{}", t.base, t.origin, word)
}

impl ExpandedMachine {
    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }

    pub fn minimal(&self) -> &MealyMachine {
        &self.minimal
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn options(&self) -> ExpansionOptions {
        self.opts
    }

    pub fn num_states(&self) -> usize {
        self.machine.num_states()
    }

    pub fn tag(&self, x: StateId) -> &HistoryTag {
        &self.tags[x]
    }

    pub fn tags(&self) -> &[HistoryTag] {
        &self.tags
    }

    /// Minimal state copied by expanded state `x`.
    pub fn base(&self, x: StateId) -> StateId {
        self.tags[x].base
    }

    /// Minimal transition behind expanded transition index `t`.
    pub fn minimal_transition(&self, t: usize) -> usize {
        let k = self.machine.num_inputs();
        self.minimal.transition_index(self.tags[t / k].base, t % k)
    }

    /// Whether expanded transition `t` copies a self-loop of the minimal machine.
    pub fn is_self_loop(&self, t: usize) -> bool {
        let k = self.machine.num_inputs();
        let (x, i) = (t / k, t % k);
        self.minimal.next(self.tags[x].base, i) == self.tags[x].base
    }
}

/// Synchronous product of pairwise IO-equivalent machines, reachable part
/// only. Outputs are taken from the first machine.
pub fn cross_product(machines: &[MealyMachine]) -> Result<MealyMachine> {
    let first = machines
        .first()
        .ok_or_else(|| Error::InvalidArgument("cross product of zero machines".into()))?;
    for m in &machines[1..] {
        if let Some(cex) = io_equivalent(first, m)? {
            return Err(Error::NotBisimilar(first.word_names(&cex.word)));
        }
    }
    let k = first.num_inputs();
    let start: Vec<StateId> = machines.iter().map(|m| m.initial()).collect();
    let mut index: HashMap<Vec<StateId>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut delta = Vec::new();
    let mut lambda = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let cur = states[head].clone();
        head += 1;
        for i in 0..k {
            let next: Vec<StateId> = machines.iter().zip(&cur).map(|(m, &s)| m.next(s, i)).collect();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    states.push(next.clone());
                    index.insert(next, states.len() - 1);
                    states.len() - 1
                }
            };
            delta.push(id);
            lambda.push(first.output(cur[0], i));
        }
    }
    let names = states
        .iter()
        .map(|tuple| {
            let parts: Vec<&str> = machines.iter().zip(tuple).map(|(m, &s)| m.state_name(s)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    MealyMachine::new(first.inputs().to_vec(), first.outputs().to_vec(), names, 0, delta, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::find_injective_bisimulation;
    use crate::models;

    fn sizes(opts: ExpansionOptions) -> Vec<usize> {
        let m = models::m_prime();
        (0..=5).map(|d| expand(&m, d, opts).unwrap().num_states()).collect()
    }

    #[test]
    fn m_prime_expansion_sizes() {
        assert_eq!(sizes(ExpansionOptions::default()), vec![3, 7, 15, 31, 63, 127]);
        let ur = ExpansionOptions {
            unique_root: true,
            ..Default::default()
        };
        assert_eq!(sizes(ur), vec![3, 5, 7, 7, 7, 7]);
    }

    #[test]
    fn depth_zero_is_identity() {
        let m = models::m_prime();
        let x = expand(&m, 0, ExpansionOptions::default()).unwrap();
        assert!(crate::automata::is_isomorphic(x.machine(), &m));
        assert_eq!(x.machine().state_name(0), "s'0|0|ε");
    }

    #[test]
    fn rejects_non_minimal() {
        assert!(matches!(
            expand(&models::test_m1(), 1, ExpansionOptions::default()),
            Err(Error::NotMinimal { actual: 5, minimal: 3 })
        ));
    }

    #[test]
    fn m1_needs_depth_two() {
        let m1 = models::test_m1();
        let min = models::m_prime();
        let x1 = expand(&min, 1, ExpansionOptions::default()).unwrap();
        let x2 = expand(&min, 2, ExpansionOptions::default()).unwrap();
        assert!(find_injective_bisimulation(&m1, x1.machine()).unwrap().is_none());
        assert!(find_injective_bisimulation(&m1, x2.machine()).unwrap().is_some());
    }

    #[test]
    fn self_loops_and_sinks() {
        let m = crate::automata::machine_from_rows(
            &["a", "b"],
            &[
                ("r", "a", "x", "p"),
                ("r", "b", "y", "z"),
                ("p", "a", "x", "z"),
                ("p", "b", "y", "r"),
                ("z", "a", "e", "z"),
                ("z", "b", "e", "z"),
            ],
        )
        .unwrap();
        let plain = expand(&m, 2, ExpansionOptions::default()).unwrap();
        let sink = expand(
            &m,
            2,
            ExpansionOptions {
                sink_ignorant: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(sink.num_states() < plain.num_states());
        let sinks = (0..sink.num_states()).filter(|&x| sink.base(x) == 2).count();
        assert_eq!(sinks, 1);
        for x in [&plain, &sink] {
            for t in 0..x.machine().num_transitions() {
                let k = x.machine().num_inputs();
                if x.is_self_loop(t) {
                    assert_eq!(x.machine().next(t / k, t % k), t / k);
                }
            }
            assert!(io_equivalent(x.machine(), &m).unwrap().is_none());
        }
    }

    #[test]
    fn bound_formula() {
        assert_eq!(size_bound(3, 2, 0), 3);
        assert_eq!(size_bound(3, 2, 2), 12 + 3);
        assert_eq!(size_bound(1, 1, 3), 1 + 3);
    }

    #[test]
    fn cross_product_of_bundled_machines() {
        let ms = [models::test_m1(), models::parity_split(), models::alternating_split()];
        let p = cross_product(&ms).unwrap();
        for m in &ms {
            assert!(find_injective_bisimulation(m, &p).unwrap().is_some());
        }
        let single = cross_product(&[models::m_prime()]).unwrap();
        assert!(crate::automata::is_isomorphic(&single, &models::m_prime()));
        let pair = cross_product(&[models::m_prime(), models::test_m1()]).unwrap();
        assert!(pair.num_states() <= 15);
    }

    #[test]
    fn cross_product_rejects_inequivalent() {
        let other = crate::automata::machine_from_rows(&["a", "b"], &[("s", "a", "A", "s"), ("s", "b", "B", "s")]).unwrap();
        assert!(matches!(
            cross_product(&[models::m_prime(), other]),
            Err(Error::NotBisimilar(_))
        ));
    }
}
