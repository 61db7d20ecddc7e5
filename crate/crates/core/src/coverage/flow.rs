//! Min-cost flow on an uncapacitated network by successive shortest paths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

const INF: i64 = i64::MAX / 4;

struct Arc {
    to: usize,
    cap: i64,
    cost: i64,
}

/// Routes `supply[v]` units out of every node with positive supply into the
/// nodes with negative supply at minimum total cost. Arcs have unbounded
/// capacity and non-negative cost. Returns the flow on each input arc, or
/// `None` if some demand cannot be reached.
pub fn min_cost_flow(n: usize, arcs: &[(usize, usize, i64)], supply: &[i64]) -> Option<Vec<u64>> {
    assert_eq!(supply.len(), n);
    assert_eq!(supply.iter().sum::<i64>(), 0, "supplies must cancel");
    let (src, sink) = (n, n + 1);
    let mut g: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let mut e: Vec<Arc> = Vec::new();
    let add = |g: &mut Vec<Vec<usize>>, e: &mut Vec<Arc>, u: usize, v: usize, cap: i64, cost: i64| {
        g[u].push(e.len());
        e.push(Arc { to: v, cap, cost });
        g[v].push(e.len());
        e.push(Arc { to: u, cap: 0, cost: -cost });
    };
    for &(u, v, c) in arcs {
        assert!(c >= 0, "negative arc cost");
        add(&mut g, &mut e, u, v, INF, c);
    }
    let mut need = 0;
    for (v, &s) in supply.iter().enumerate() {
        if s > 0 {
            add(&mut g, &mut e, src, v, s, 0);
            need += s;
        } else if s < 0 {
            add(&mut g, &mut e, v, sink, -s, 0);
        }
    }

    let total = n + 2;
    let mut potential = vec![0i64; total];
    let mut sent = 0;
    while sent < need {
        let mut dist = vec![INF; total];
        let mut via = vec![usize::MAX; total];
        dist[src] = 0;
        let mut heap = BinaryHeap::from([Reverse((0i64, src))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &a in &g[u] {
                let arc = &e[a];
                if arc.cap <= 0 {
                    continue;
                }
                let nd = d + arc.cost + potential[u] - potential[arc.to];
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    via[arc.to] = a;
                    heap.push(Reverse((nd, arc.to)));
                }
            }
        }
        if dist[sink] >= INF {
            return None;
        }
        for v in 0..total {
            if dist[v] < INF {
                potential[v] += dist[v];
            }
        }
        let mut push = need - sent;
        let mut v = sink;
        while v != src {
            let a = via[v];
            push = push.min(e[a].cap);
            v = e[a ^ 1].to;
        }
        let mut v = sink;
        while v != src {
            let a = via[v];
            e[a].cap -= push;
            e[a ^ 1].cap += push;
            v = e[a ^ 1].to;
        }
        sent += push;
    }
    Some((0..arcs.len()).map(|j| e[2 * j + 1].cap as u64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(arcs: &[(usize, usize, i64)], flow: &[u64]) -> i64 {
        arcs.iter().zip(flow).map(|(a, &f)| a.2 * f as i64).sum()
    }

    #[test]
    fn picks_cheaper_route() {
        let arcs = [(0, 1, 5), (0, 2, 1), (2, 1, 1)];
        let f = min_cost_flow(3, &arcs, &[2, -2, 0]).unwrap();
        assert_eq!(f, vec![0, 2, 2]);
        assert_eq!(cost(&arcs, &f), 4);
    }

    #[test]
    fn conserves_flow() {
        let arcs = [(0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 2, 3), (3, 0, 0), (2, 3, 2)];
        let supply = [1, 2, -4, 1];
        let f = min_cost_flow(4, &arcs, &supply).unwrap();
        for v in 0..4 {
            let out: i64 = arcs.iter().zip(&f).filter(|(a, _)| a.0 == v).map(|(_, &x)| x as i64).sum();
            let inn: i64 = arcs.iter().zip(&f).filter(|(a, _)| a.1 == v).map(|(_, &x)| x as i64).sum();
            assert_eq!(out - inn, supply[v]);
        }
        assert_eq!(cost(&arcs, &f), 6);
    }

    #[test]
    fn unreachable_demand() {
        assert!(min_cost_flow(2, &[(1, 0, 1)], &[1, -1]).is_none());
    }
}
