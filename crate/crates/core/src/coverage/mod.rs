//! Planning input sequences that traverse every transition of an expanded
//! machine a required number of times, at minimum cost where possible.
//!
//! The requirements become a directed multigraph over the machine's states
//! with one edge per transition plus a reset edge from every non-root state
//! back to the root. Mandatory components are joined by a minimum
//! arborescence over shortest paths, node imbalances are removed with a
//! min-cost flow, and the balanced graph is walked as an Eulerian circuit.

mod arborescence;
mod euler;
mod flow;

use std::collections::{BTreeMap, BinaryHeap};
use std::cmp::Reverse;

use serde::Serialize;

use crate::automata::{InputId, MealyMachine, StateId, Word};
use crate::error::{Error, Result};
use crate::expansion::ExpandedMachine;
use crate::learner::{Run, SampleLog, TransitionSamples};
use crate::mdm::SulSession;

pub use arborescence::min_arborescence;
pub use euler::eulerian_circuit;
pub use flow::min_cost_flow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Costs {
    pub step: u64,
    pub reset: u64,
}

impl Default for Costs {
    fn default() -> Self {
        Self { step: 1, reset: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Input(InputId),
    Reset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageEdge {
    pub src: StateId,
    pub dst: StateId,
    pub label: EdgeLabel,
    /// Traversals the plan must contain.
    pub mandatory: u64,
    /// Traversals added for connectivity or balance.
    pub extra: u64,
    pub cost: u64,
}

impl CoverageEdge {
    pub fn traversals(&self) -> u64 {
        self.mandatory + self.extra
    }
}

/// Edge `s * |I| + i` is transition `(s, i)`; reset edges follow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageGraph {
    num_nodes: usize,
    num_inputs: usize,
    root: StateId,
    edges: Vec<CoverageEdge>,
    joined: bool,
}

/// Residual sampling requirement `max(0, k - K(s, i))` for every transition
/// of `mx`. With `relax_self_loops`, copies of the same minimal self-loop
/// share one requirement of `k` samples in total, charged to a single copy.
pub fn residual_counts(samples: &TransitionSamples, mx: &ExpandedMachine, k: u64, relax_self_loops: bool) -> Vec<u64> {
    let m = mx.machine();
    let n = m.num_transitions();
    assert_eq!(samples.len(), n, "samples must be attributed to the expansion");
    let have = |t: usize| samples.get(t).len() as u64;
    let mut out: Vec<u64> = (0..n).map(|t| k.saturating_sub(have(t))).collect();
    if !relax_self_loops {
        return out;
    }
    let ki = m.num_inputs();
    let mut touched = vec![false; m.num_states()];
    for t in 0..n {
        if !mx.is_self_loop(t) && out[t] > 0 {
            touched[t / ki] = true;
            touched[m.next(t / ki, t % ki)] = true;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in (0..n).filter(|&t| mx.is_self_loop(t)) {
        groups.entry(mx.minimal_transition(t)).or_default().push(t);
        out[t] = 0;
    }
    for copies in groups.values() {
        let total: u64 = copies.iter().map(|&t| have(t)).sum();
        let need = k.saturating_sub(total);
        if need > 0 {
            let pick = copies.iter().copied().find(|&t| touched[t / ki]).unwrap_or(copies[0]);
            out[pick] = need;
        }
    }
    out
}

/// Requirement vector from a map `"state/input" -> count`; the key is split at
/// its last `/`. Transitions not mentioned require nothing.
pub fn requirements_from_map(m: &MealyMachine, counts: &BTreeMap<String, u64>) -> Result<Vec<u64>> {
    let mut out = vec![0; m.num_transitions()];
    for (key, &c) in counts {
        let (s, i) = key
            .rsplit_once('/')
            .ok_or_else(|| Error::InvalidArgument(format!("expected `state/input`, got `{key}`")))?;
        let s = m
            .state_index(s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown state `{s}`")))?;
        let i = m.input_index(i).ok_or_else(|| Error::UnknownInput(i.to_string()))?;
        out[m.transition_index(s, i)] = c;
    }
    Ok(out)
}

/// Coverage graph of `m` with mandatory multiplicities `residual`.
pub fn build_coverage_graph(m: &MealyMachine, residual: &[u64], costs: Costs) -> CoverageGraph {
    assert_eq!(residual.len(), m.num_transitions());
    let root = m.initial();
    let mut edges: Vec<CoverageEdge> = m
        .transitions()
        .map(|(s, i, _, t)| CoverageEdge {
            src: s,
            dst: t,
            label: EdgeLabel::Input(i),
            mandatory: residual[m.transition_index(s, i)],
            extra: 0,
            cost: costs.step,
        })
        .collect();
    for s in (0..m.num_states()).filter(|&s| s != root) {
        edges.push(CoverageEdge {
            src: s,
            dst: root,
            label: EdgeLabel::Reset,
            mandatory: 0,
            extra: 0,
            cost: costs.reset,
        });
    }
    CoverageGraph {
        num_nodes: m.num_states(),
        num_inputs: m.num_inputs(),
        root,
        edges,
        joined: false,
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

impl CoverageGraph {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn edges(&self) -> &[CoverageEdge] {
        &self.edges
    }

    pub fn reset_edges(&self) -> impl Iterator<Item = &CoverageEdge> {
        self.edges.iter().filter(|e| e.label == EdgeLabel::Reset)
    }

    /// Mandatory multiplicity per `(src, dst)` pair, summed over inputs.
    pub fn aggregated_mandatory(&self) -> BTreeMap<(StateId, StateId), u64> {
        let mut out = BTreeMap::new();
        for e in self.edges.iter().filter(|e| e.mandatory > 0) {
            *out.entry((e.src, e.dst)).or_insert(0) += e.mandatory;
        }
        out
    }

    pub fn mandatory_total(&self) -> u64 {
        self.edges.iter().map(|e| e.mandatory).sum()
    }

    /// Out-degree minus in-degree of `v`, counting every traversal.
    pub fn imbalance(&self, v: StateId) -> i64 {
        let mut d = 0i64;
        for e in &self.edges {
            if e.src == v {
                d += e.traversals() as i64;
            }
            if e.dst == v {
                d -= e.traversals() as i64;
            }
        }
        d
    }

    pub fn is_balanced(&self) -> bool {
        (0..self.num_nodes).all(|v| self.imbalance(v) == 0)
    }

    /// Whether connectivity edges had to be added, in which case the plan is
    /// not guaranteed to be optimal.
    pub fn needed_joining(&self) -> bool {
        self.joined
    }

    fn mandatory_components(&self) -> (Vec<usize>, Vec<bool>) {
        let mut uf = UnionFind((0..self.num_nodes).collect());
        let mut active = vec![false; self.num_nodes];
        active[self.root] = true;
        for e in self.edges.iter().filter(|e| e.mandatory > 0) {
            active[e.src] = true;
            active[e.dst] = true;
            uf.union(e.src, e.dst);
        }
        ((0..self.num_nodes).map(|v| uf.find(v)).collect(), active)
    }

    /// Whether the root and all mandatory edges form one weakly connected piece.
    pub fn mandatory_connected(&self) -> bool {
        let (comp, active) = self.mandatory_components();
        (0..self.num_nodes).filter(|&v| active[v]).all(|v| comp[v] == comp[self.root])
    }

    /// Cheapest paths from a set of nodes: distance and incoming edge per node.
    fn shortest_from(&self, sources: &[StateId]) -> (Vec<u64>, Vec<usize>) {
        let mut dist = vec![u64::MAX; self.num_nodes];
        let mut via = vec![usize::MAX; self.num_nodes];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0;
            heap.push(Reverse((0u64, s)));
        }
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_nodes];
        for (j, e) in self.edges.iter().enumerate() {
            out[e.src].push(j);
        }
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &j in &out[u] {
                let e = &self.edges[j];
                let nd = d + e.cost;
                if nd < dist[e.dst] {
                    dist[e.dst] = nd;
                    via[e.dst] = j;
                    heap.push(Reverse((nd, e.dst)));
                }
            }
        }
        (dist, via)
    }

    /// Joins mandatory components to the root's component along a minimum
    /// arborescence of shortest paths, then balances every node with a
    /// min-cost flow. The result admits an Eulerian circuit from the root.
    pub fn balance_and_connect(&self) -> CoverageGraph {
        let mut g = self.clone();
        let (comp, active) = g.mandatory_components();
        let mut reps: Vec<usize> = (0..g.num_nodes).filter(|&v| active[v]).map(|v| comp[v]).collect();
        reps.sort_unstable();
        reps.dedup();
        if reps.len() > 1 {
            g.joined = true;
            let index = |c: usize| reps.binary_search(&c).unwrap();
            let members: Vec<Vec<StateId>> = reps
                .iter()
                .map(|&r| (0..g.num_nodes).filter(|&v| active[v] && comp[v] == r).collect())
                .collect();
            let mut arcs = Vec::new();
            let mut paths = Vec::new();
            for (a, nodes) in members.iter().enumerate() {
                let (dist, via) = g.shortest_from(nodes);
                for (b, targets) in members.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    let Some(&t) = targets.iter().filter(|&&t| dist[t] < u64::MAX).min_by_key(|&&t| (dist[t], t)) else {
                        continue;
                    };
                    let mut path = Vec::new();
                    let mut v = t;
                    while !nodes.contains(&v) {
                        path.push(via[v]);
                        v = g.edges[via[v]].src;
                    }
                    arcs.push((a, b, dist[t] as i64));
                    paths.push(path);
                }
            }
            let tree = min_arborescence(reps.len(), index(comp[g.root]), &arcs).expect("every state reachable from the root");
            for j in tree {
                for &e in &paths[j] {
                    g.edges[e].extra += 1;
                }
            }
        }

        let supply: Vec<i64> = (0..g.num_nodes).map(|v| -g.imbalance(v)).collect();
        if supply.iter().any(|&s| s != 0) {
            let arcs: Vec<(usize, usize, i64)> = g.edges.iter().map(|e| (e.src, e.dst, e.cost as i64)).collect();
            let flow = min_cost_flow(g.num_nodes, &arcs, &supply).expect("reset edges make balancing feasible");
            for (e, f) in g.edges.iter_mut().zip(flow) {
                e.extra += f;
            }
        }
        g
    }
}

/// Reset-separated input words covering a coverage graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveragePlan {
    pub words: Vec<Word>,
    /// Steps times step cost plus resets between words times reset cost.
    pub cost: u64,
    /// Cost of the closed circuit, including a final return to the root.
    pub circuit_cost: u64,
    pub resets: u64,
    /// Traversals per transition when the plan is replayed.
    pub coverage: Vec<u64>,
}

impl CoveragePlan {
    pub fn empty(transitions: usize) -> Self {
        Self {
            words: Vec::new(),
            cost: 0,
            circuit_cost: 0,
            resets: 0,
            coverage: vec![0; transitions],
        }
    }

    pub fn steps(&self) -> u64 {
        self.words.iter().map(|w| w.len() as u64).sum()
    }

    /// Plan with words spelled out as input names.
    pub fn named(&self, m: &MealyMachine) -> NamedPlan {
        NamedPlan {
            words: self.words.iter().map(|w| m.word_names(w)).collect(),
            cost: self.cost,
            resets: self.resets,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedPlan {
    pub words: Vec<Vec<String>>,
    pub cost: u64,
    pub resets: u64,
}

/// Walks a balanced coverage graph as an Eulerian circuit from the root,
/// lowest input first and resets last, and cuts it at the resets.
pub fn eulerian_plan(g: &CoverageGraph, m: &MealyMachine) -> Result<CoveragePlan> {
    if g.num_nodes != m.num_states() || g.num_inputs != m.num_inputs() {
        return Err(Error::InvalidArgument("coverage graph does not belong to this machine".into()));
    }
    if !g.is_balanced() {
        return Err(Error::NotEulerian("node imbalance".into()));
    }
    if g.edges.iter().all(|e| e.traversals() == 0) {
        return Ok(CoveragePlan::empty(m.num_transitions()));
    }
    let ends: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.src, e.dst)).collect();
    let count: Vec<u64> = g.edges.iter().map(CoverageEdge::traversals).collect();
    let mut order: Vec<Vec<usize>> = vec![Vec::new(); g.num_nodes];
    for (j, e) in g.edges.iter().enumerate() {
        order[e.src].push(j);
    }
    for adj in &mut order {
        adj.sort_by_key(|&j| (g.edges[j].label, j));
    }
    let circuit = eulerian_circuit(g.root, &ends, &count, &order)
        .ok_or_else(|| Error::NotEulerian("edges unreachable from the root".into()))?;

    let mut words = Vec::new();
    let mut current = Vec::new();
    let mut circuit_cost = 0;
    for &j in &circuit {
        let e = &g.edges[j];
        circuit_cost += e.cost;
        match e.label {
            EdgeLabel::Input(i) => current.push(i),
            EdgeLabel::Reset => words.push(std::mem::take(&mut current)),
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    let costs = Costs {
        step: g.edges.iter().find(|e| matches!(e.label, EdgeLabel::Input(_))).map_or(1, |e| e.cost),
        reset: g.reset_edges().next().map_or(1, |e| e.cost),
    };
    let mut coverage = vec![0u64; m.num_transitions()];
    for w in &words {
        let mut s = m.initial();
        for &i in w {
            coverage[m.transition_index(s, i)] += 1;
            s = m.next(s, i);
        }
    }
    let resets = words.len().saturating_sub(1) as u64;
    let steps: u64 = words.iter().map(|w| w.len() as u64).sum();
    Ok(CoveragePlan {
        cost: steps * costs.step + resets * costs.reset,
        circuit_cost,
        resets,
        words,
        coverage,
    })
}

/// Builds, joins, balances and linearizes in one go.
pub fn plan_coverage(m: &MealyMachine, residual: &[u64], costs: Costs) -> Result<CoveragePlan> {
    let g = build_coverage_graph(m, residual, costs).balance_and_connect();
    eulerian_plan(&g, m)
}

/// Runs every plan word after a reset and checks the outputs against `m`.
pub fn execute_plan(session: &mut SulSession, plan: &CoveragePlan, m: &MealyMachine) -> Result<SampleLog> {
    let mut log = SampleLog::default();
    for w in &plan.words {
        let (outputs, delays) = session.query(w)?;
        let mut s = m.initial();
        for (pos, (&i, o)) in w.iter().zip(&outputs).enumerate() {
            if m.output_name(s, i) != o {
                return Err(Error::StructuralViolation {
                    word: m.word_names(&w[..=pos]),
                    position: pos,
                    expected: m.output_name(s, i).to_string(),
                    actual: o.clone(),
                });
            }
            s = m.next(s, i);
        }
        log.push(Run {
            word: w.clone(),
            outputs,
            delays,
        });
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::machine_from_rows;
    use crate::expansion::{expand, ExpansionOptions};
    use crate::mdm::{expand_ground_truth, make_random_mdm, GroundTruthOptions};
    use crate::models;
    use std::collections::HashMap;

    /// Cheapest closed walk from the root covering every requirement, by
    /// Dijkstra over (state, remaining requirements).
    pub(crate) fn brute_force_circuit(m: &MealyMachine, need: &[u64], costs: Costs) -> u64 {
        let start = (m.initial(), need.to_vec());
        let mut dist: HashMap<(usize, Vec<u64>), u64> = HashMap::from([(start.clone(), 0)]);
        let mut heap = BinaryHeap::from([Reverse((0u64, start))]);
        while let Some(Reverse((d, (s, left)))) = heap.pop() {
            if dist.get(&(s, left.clone())).is_some_and(|&b| b < d) {
                continue;
            }
            if s == m.initial() && left.iter().all(|&x| x == 0) {
                return d;
            }
            let mut moves = Vec::new();
            for i in 0..m.num_inputs() {
                let t = m.transition_index(s, i);
                let mut l = left.clone();
                l[t] = l[t].saturating_sub(1);
                moves.push((m.next(s, i), l, costs.step));
            }
            if s != m.initial() {
                moves.push((m.initial(), left.clone(), costs.reset));
            }
            for (t, l, c) in moves {
                let nd = d + c;
                let key = (t, l);
                if dist.get(&key).map_or(true, |&b| nd < b) {
                    dist.insert(key.clone(), nd);
                    heap.push(Reverse((nd, key)));
                }
            }
        }
        unreachable!("every state returns to the root by reset")
    }

    fn two_cycle() -> MealyMachine {
        machine_from_rows(
            &["a", "b"],
            &[("0", "a", "x", "1"), ("0", "b", "x", "0"), ("1", "a", "x", "1"), ("1", "b", "x", "0")],
        )
        .unwrap()
    }

    #[test]
    fn two_cycle_single_word() {
        let m = two_cycle();
        let need = vec![2, 0, 0, 2];
        let g = build_coverage_graph(&m, &need, Costs::default());
        assert_eq!(g.reset_edges().count(), 1);
        let p = plan_coverage(&m, &need, Costs::default()).unwrap();
        assert_eq!(p.words, vec![vec![0, 1, 0, 1]]);
        assert_eq!((p.cost, p.resets), (4, 0));
        assert_eq!(p.cost, brute_force_circuit(&m, &need, Costs::default()));
    }

    #[test]
    fn line_needs_resets() {
        let m = machine_from_rows(&["a"], &[("0", "a", "x", "1"), ("1", "a", "x", "1")]).unwrap();
        let g = build_coverage_graph(&m, &[3, 0], Costs::default()).balance_and_connect();
        let resets: u64 = g.reset_edges().map(|e| e.traversals()).sum();
        assert_eq!(resets, 3);
        let p = eulerian_plan(&g, &m).unwrap();
        assert_eq!(p.words, vec![vec![0]; 3]);
        assert_eq!((p.circuit_cost, p.cost, p.resets), (6, 5, 2));
        assert_eq!(p.circuit_cost, brute_force_circuit(&m, &[3, 0], Costs::default()));
    }

    #[test]
    fn m_prime_uniform_requirements() {
        let m = models::m_prime();
        let g = build_coverage_graph(&m, &vec![2; 6], Costs::default());
        // Both inputs of every state lead to the same successor.
        assert_eq!(g.edges().iter().filter(|e| e.mandatory == 2).count(), 6);
        assert_eq!(g.aggregated_mandatory().len(), 3);
        assert!(g.aggregated_mandatory().values().all(|&x| x == 4));
        assert_eq!(g.reset_edges().count(), 2);
        let p = plan_coverage(&m, &vec![1; 6], Costs::default()).unwrap();
        assert_eq!((p.cost, p.resets), (6, 0));
        assert!(p.coverage.iter().all(|&c| c == 1));
    }

    #[test]
    fn nothing_to_cover() {
        let m = models::m_prime();
        let g = build_coverage_graph(&m, &[0; 6], Costs::default());
        assert!(g.aggregated_mandatory().is_empty());
        let p = plan_coverage(&m, &[0; 6], Costs::default()).unwrap();
        assert_eq!(p, CoveragePlan::empty(6));
        let mut s = SulSession::simulate(make_random_mdm(&m, 0, (1.0, 1.0)), 0);
        assert!(execute_plan(&mut s, &p, &m).unwrap().runs().is_empty());
        assert_eq!(s.actions(), 0);
    }

    #[test]
    fn single_state_has_no_resets() {
        let m = machine_from_rows(&["a"], &[("q", "a", "x", "q")]).unwrap();
        let g = build_coverage_graph(&m, &[4], Costs::default());
        assert_eq!(g.reset_edges().count(), 0);
        let p = eulerian_plan(&g.balance_and_connect(), &m).unwrap();
        assert_eq!(p.words, vec![vec![0; 4]]);
    }

    #[test]
    fn islands_are_joined() {
        // 0 -a-> 1 -a-> 2 -a-> 3 -a-> 0, mandatory only on 0->1 and 2->3.
        let m = machine_from_rows(
            &["a"],
            &[("0", "a", "x", "1"), ("1", "a", "x", "2"), ("2", "a", "x", "3"), ("3", "a", "x", "0")],
        )
        .unwrap();
        let need = [1, 0, 1, 0];
        let raw = build_coverage_graph(&m, &need, Costs::default());
        assert!(!raw.mandatory_connected());
        let g = raw.balance_and_connect();
        assert!(g.needed_joining());
        assert!(g.edges().iter().any(|e| e.mandatory == 0 && e.extra > 0));
        let p = eulerian_plan(&g, &m).unwrap();
        assert!(p.coverage.iter().zip(&need).all(|(c, n)| c >= n));
        assert_eq!(p.circuit_cost, 4);
    }

    #[test]
    fn unbalanced_graph_rejected() {
        let m = two_cycle();
        let g = build_coverage_graph(&m, &[1, 0, 0, 0], Costs::default());
        assert!(matches!(eulerian_plan(&g, &m), Err(Error::NotEulerian(_))));
    }

    #[test]
    fn reset_cost_changes_plan() {
        let m = machine_from_rows(
            &["a", "b"],
            &[("0", "a", "x", "1"), ("0", "b", "x", "0"), ("1", "a", "x", "2"), ("1", "b", "x", "0"), ("2", "a", "x", "2"), ("2", "b", "x", "2")],
        )
        .unwrap();
        let need = [2, 0, 0, 0, 0, 0];
        for reset in [0, 1, 5] {
            let costs = Costs { step: 1, reset };
            let p = plan_coverage(&m, &need, costs).unwrap();
            assert_eq!(p.circuit_cost, brute_force_circuit(&m, &need, costs), "reset cost {reset}");
        }
    }

    #[test]
    fn plans_match_brute_force_on_random_machines() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        for _ in 0..400 {
            let n = rng.gen_range(1..=4);
            let rows: Vec<(String, String, String, String)> = (0..n)
                .flat_map(|s| ["a", "b"].map(|i| (s.to_string(), i.to_string(), "x".to_string(), rng.gen_range(0..n).to_string())))
                .collect();
            let refs: Vec<(&str, &str, &str, &str)> = rows.iter().map(|r| (&*r.0, &*r.1, &*r.2, &*r.3)).collect();
            let m = machine_from_rows(&["a", "b"], &refs).unwrap();
            let mut need = vec![0u64; m.num_transitions()];
            for _ in 0..rng.gen_range(0..=6) {
                let t = rng.gen_range(0..need.len());
                need[t] += 1;
            }
            let g = build_coverage_graph(&m, &need, Costs::default());
            let p = plan_coverage(&m, &need, Costs::default()).unwrap();
            assert!(p.coverage.iter().zip(&need).all(|(c, n)| c >= n));
            let best = brute_force_circuit(&m, &need, Costs::default());
            assert!(p.circuit_cost >= best);
            if g.mandatory_connected() {
                assert_eq!(p.circuit_cost, best, "{rows:?} {need:?}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn requirements_by_name() {
        let m = models::m_prime();
        let counts = BTreeMap::from([("s1/b".to_string(), 3), ("s0/a".to_string(), 1)]);
        let r = requirements_from_map(&m, &counts).unwrap();
        assert_eq!(r, vec![1, 0, 0, 3, 0, 0]);
        let bad = BTreeMap::from([("s9/a".to_string(), 1)]);
        assert!(requirements_from_map(&m, &bad).is_err());
        let bad = BTreeMap::from([("s0/z".to_string(), 1)]);
        assert!(requirements_from_map(&m, &bad).is_err());
    }

    #[test]
    fn residuals() {
        let mx = expand(&models::m_prime(), 1, ExpansionOptions::default()).unwrap();
        let mut samples = TransitionSamples::new(mx.machine().num_transitions());
        for _ in 0..7 {
            samples.push(0, 1.0);
        }
        let r = residual_counts(&samples, &mx, 5, false);
        assert_eq!(r[0], 0);
        assert!(r[1..].iter().all(|&x| x == 5));
    }

    #[test]
    fn relaxed_self_loops_share_one_requirement() {
        let m = machine_from_rows(
            &["a", "b"],
            &[("r", "a", "x", "p"), ("r", "b", "y", "z"), ("p", "a", "x", "z"), ("p", "b", "y", "r"), ("z", "a", "e", "z"), ("z", "b", "e", "z")],
        )
        .unwrap();
        let mx = expand(&m, 2, ExpansionOptions::default()).unwrap();
        let samples = TransitionSamples::new(mx.machine().num_transitions());
        let strict = residual_counts(&samples, &mx, 10, false);
        let relaxed = residual_counts(&samples, &mx, 10, true);
        let loops: Vec<usize> = (0..strict.len()).filter(|&t| mx.is_self_loop(t)).collect();
        assert!(loops.len() > 2);
        assert_eq!(loops.iter().map(|&t| relaxed[t]).sum::<u64>(), 20);
        for t in (0..strict.len()).filter(|t| !loops.contains(t)) {
            assert_eq!(strict[t], relaxed[t]);
        }
    }

    #[test]
    fn execution_reaches_k_on_expanded_m_prime() {
        let min = models::m_prime();
        let mx = expand(&min, 2, ExpansionOptions::default()).unwrap();
        let truth = expand_ground_truth(&min, 2, 4, GroundTruthOptions::default()).unwrap();
        let mut s = SulSession::simulate(truth, 1);
        let k = 30;
        let samples = TransitionSamples::new(mx.machine().num_transitions());
        let need = residual_counts(&samples, &mx, k, true);
        let plan = plan_coverage(mx.machine(), &need, Costs::default()).unwrap();
        let log = execute_plan(&mut s, &plan, mx.machine()).unwrap();
        let got = log.attribute(mx.machine()).unwrap();
        let non_loops = (0..got.len()).filter(|&t| !mx.is_self_loop(t)).count();
        assert_eq!(non_loops, 30);
        for t in (0..got.len()).filter(|&t| !mx.is_self_loop(t)) {
            assert!(got.get(t).len() as u64 >= k);
        }
        assert_eq!(s.steps(), plan.steps());
    }

    #[test]
    fn mismatch_is_structural_violation() {
        let m = models::m_prime();
        let plan = plan_coverage(&m, &[1, 0, 0, 0, 0, 0], Costs::default()).unwrap();
        let bogus = machine_from_rows(&["a", "b"], &[("q", "a", "Z", "q"), ("q", "b", "Z", "q")]).unwrap();
        let mut s = SulSession::simulate(make_random_mdm(&m, 0, (1.0, 1.0)), 0);
        match execute_plan(&mut s, &plan, &bogus) {
            Err(Error::StructuralViolation { position, expected, .. }) => {
                assert_eq!(position, 0);
                assert_eq!(expected, "Z");
            }
            other => panic!("{other:?}"),
        }
    }
}
