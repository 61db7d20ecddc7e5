//! Minimum spanning arborescence (Chu-Liu/Edmonds).

/// Returns the indices of the arcs of a minimum-weight arborescence rooted at
/// `root` that reaches every node, or `None` if some node is unreachable.
/// Ties are broken towards the lower arc index.
pub fn min_arborescence(n: usize, root: usize, arcs: &[(usize, usize, i64)]) -> Option<Vec<usize>> {
    let list: Vec<(usize, usize, i64)> = arcs.to_vec();
    let picked = solve(n, root, &list)?;
    let mut out = picked;
    out.sort_unstable();
    Some(out)
}

fn solve(n: usize, root: usize, arcs: &[(usize, usize, i64)]) -> Option<Vec<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (j, &(u, v, w)) in arcs.iter().enumerate() {
        if u == v || v == root {
            continue;
        }
        if best[v].is_none_or(|b| w < arcs[b].2) {
            best[v] = Some(j);
        }
    }
    if (0..n).any(|v| v != root && best[v].is_none()) {
        return None;
    }

    // Find cycles among the chosen parent pointers.
    let mut comp = vec![usize::MAX; n];
    let mut mark = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        let mut v = start;
        while v != root && mark[v] == usize::MAX && comp[v] == usize::MAX {
            mark[v] = start;
            v = arcs[best[v].unwrap()].0;
        }
        if v != root && mark[v] == start && comp[v] == usize::MAX {
            let mut cycle = vec![v];
            let mut u = arcs[best[v].unwrap()].0;
            while u != v {
                cycle.push(u);
                u = arcs[best[u].unwrap()].0;
            }
            for &c in &cycle {
                comp[c] = n + cycles.len();
            }
            cycles.push(cycle);
        }
    }
    if cycles.is_empty() {
        return Some((0..n).filter(|&v| v != root).map(|v| best[v].unwrap()).collect());
    }

    // Contract every cycle into a single node.
    let mut id = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if comp[v] == usize::MAX {
            id[v] = next;
            next += 1;
        }
    }
    let cycle_base = next;
    for v in 0..n {
        if comp[v] != usize::MAX {
            id[v] = cycle_base + (comp[v] - n);
        }
    }
    let m = cycle_base + cycles.len();
    let mut sub = Vec::new();
    let mut origin = Vec::new();
    for (j, &(u, v, w)) in arcs.iter().enumerate() {
        let (cu, cv) = (id[u], id[v]);
        if cu == cv {
            continue;
        }
        let w = if comp[v] != usize::MAX { w - arcs[best[v].unwrap()].2 } else { w };
        sub.push((cu, cv, w));
        origin.push(j);
    }
    let chosen = solve(m, id[root], &sub)?;
    let mut out: Vec<usize> = chosen.iter().map(|&c| origin[c]).collect();
    for cycle in &cycles {
        let entry = out.iter().map(|&j| arcs[j].1).find(|v| cycle.contains(v)).expect("cycle entered");
        for &c in cycle {
            if c != entry {
                out.push(best[c].unwrap());
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(arcs: &[(usize, usize, i64)], picked: &[usize]) -> i64 {
        picked.iter().map(|&j| arcs[j].2).sum()
    }

    /// Exhaustive minimum over all parent assignments.
    fn brute(n: usize, root: usize, arcs: &[(usize, usize, i64)]) -> Option<i64> {
        let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let choices: Vec<Vec<usize>> = others
            .iter()
            .map(|&v| (0..arcs.len()).filter(|&j| arcs[j].1 == v && arcs[j].0 != v).collect())
            .collect();
        let mut best = None;
        let mut idx = vec![0; others.len()];
        if choices.iter().any(Vec::is_empty) {
            return None;
        }
        loop {
            let parent: Vec<usize> = (0..n)
                .map(|v| others.iter().position(|&o| o == v).map_or(v, |p| arcs[choices[p][idx[p]]].0))
                .collect();
            let ok = others.iter().all(|&v| {
                let mut u = v;
                for _ in 0..n {
                    if u == root {
                        return true;
                    }
                    u = parent[u];
                }
                false
            });
            if ok {
                let w: i64 = (0..others.len()).map(|p| arcs[choices[p][idx[p]]].2).sum();
                best = Some(best.map_or(w, |b: i64| b.min(w)));
            }
            let mut p = 0;
            loop {
                if p == idx.len() {
                    return best;
                }
                idx[p] += 1;
                if idx[p] < choices[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    #[test]
    fn cycle_is_broken() {
        let arcs = [(0, 1, 10), (1, 2, 1), (2, 1, 1), (0, 2, 12)];
        let p = min_arborescence(3, 0, &arcs).unwrap();
        assert_eq!(weight(&arcs, &p), 11);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn unreachable() {
        assert!(min_arborescence(3, 0, &[(0, 1, 1), (2, 1, 1)]).is_none());
    }

    #[test]
    fn matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(n..=3 * n);
            let arcs: Vec<(usize, usize, i64)> = (0..m)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..5)))
                .collect();
            let got = min_arborescence(n, 0, &arcs).map(|p| weight(&arcs, &p));
            assert_eq!(got, brute(n, 0, &arcs), "{arcs:?}");
        }
    }
}
