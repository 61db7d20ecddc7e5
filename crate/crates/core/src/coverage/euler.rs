//! Hierholzer's algorithm on a multigraph with edge multiplicities.

/// Eulerian circuit from `start` using edge `j` exactly `count[j]` times.
/// `order` lists each node's edges in the preferred traversal order.
/// Returns the edge sequence, or `None` if some edge is left unused.
pub fn eulerian_circuit(
    start: usize,
    edges: &[(usize, usize)],
    count: &[u64],
    order: &[Vec<usize>],
) -> Option<Vec<usize>> {
    let mut left = count.to_vec();
    let mut cursor = vec![0usize; order.len()];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut circuit = Vec::new();
    while let Some(&(v, via)) = stack.last() {
        let adj = &order[v];
        while cursor[v] < adj.len() && left[adj[cursor[v]]] == 0 {
            cursor[v] += 1;
        }
        if cursor[v] < adj.len() {
            let e = adj[cursor[v]];
            left[e] -= 1;
            stack.push((edges[e].1, Some(e)));
        } else {
            stack.pop();
            if let Some(e) = via {
                circuit.push(e);
            }
        }
    }
    circuit.reverse();
    if left.iter().any(|&c| c > 0) {
        return None;
    }
    Some(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut o = vec![Vec::new(); n];
        for (j, e) in edges.iter().enumerate() {
            o[e.0].push(j);
        }
        o
    }

    #[test]
    fn splices_subtours() {
        let edges = [(0, 1), (1, 0), (1, 2), (2, 1)];
        let c = eulerian_circuit(0, &edges, &[1, 1, 1, 1], &order(3, &edges)).unwrap();
        assert_eq!(c, vec![0, 2, 3, 1]);
    }

    #[test]
    fn multiplicities() {
        let edges = [(0, 1), (1, 0)];
        let c = eulerian_circuit(0, &edges, &[2, 2], &order(2, &edges)).unwrap();
        assert_eq!(c, vec![0, 1, 0, 1]);
    }

    #[test]
    fn disconnected_edges_rejected() {
        let edges = [(0, 0), (1, 1)];
        assert!(eulerian_circuit(0, &edges, &[1, 1], &order(2, &edges)).is_none());
    }
}
