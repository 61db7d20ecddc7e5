use std::collections::HashMap;

use super::{MealyMachine, StateId};

/// Partition of states into I*-equivalence classes. Block ids are assigned in
/// BFS order of the first state of each block, so the result is canonical.
pub fn io_partition(m: &MealyMachine) -> Vec<usize> {
    let n = m.num_states();
    let k = m.num_inputs();
    // Seed with the output signature.
    let mut block = assign(n, |s| (0..k).map(|i| m.output(s, i)).collect::<Vec<_>>());
    loop {
        let refined = assign(n, |s| {
            let mut sig = Vec::with_capacity(k + 1);
            sig.push(block[s]);
            sig.extend((0..k).map(|i| block[m.next(s, i)]));
            sig
        });
        let done = count(&refined) == count(&block);
        block = refined;
        if done {
            break;
        }
    }
    // Renumber blocks by BFS order of their first-visited state.
    let mut renum = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for s in m.bfs_order() {
        if renum[block[s]] == usize::MAX {
            renum[block[s]] = next;
            next += 1;
        }
        out[s] = renum[block[s]];
    }
    out
}

fn assign<K: std::hash::Hash + Eq>(n: usize, sig: impl Fn(StateId) -> K) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    (0..n)
        .map(|s| {
            let len = ids.len();
            *ids.entry(sig(s)).or_insert(len)
        })
        .collect()
}

fn count(block: &[usize]) -> usize {
    block.iter().copied().max().map_or(0, |m| m + 1)
}

/// Minimal IO-equivalent machine, states renumbered in BFS order as `s0..`.
pub fn minimize(m: &MealyMachine) -> MealyMachine {
    m.quotient_by(&io_partition(m)).canonical()
}
