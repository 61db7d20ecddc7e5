//! Deterministic, complete Mealy machines.
//!
//! States, inputs and outputs are dense indices. Input order is fixed at
//! construction time and drives every tie-break downstream (BFS numbering,
//! counterexample selection, plan construction).

mod dot;
mod equivalence;
mod minimize;

pub use dot::{parse_dot, parse_dot_with, serialize_dot, DotOptions, SINK_OUTPUT};
pub use equivalence::{
    find_injective_bisimulation, io_equivalent, is_isomorphic, Counterexample,
};
pub use minimize::{io_partition, minimize};

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

pub type StateId = usize;
pub type InputId = usize;
pub type OutputId = usize;
/// An input word as a sequence of input indices.
pub type Word = Vec<InputId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyMachine {
    inputs: Vec<String>,
    outputs: Vec<String>,
    state_names: Vec<String>,
    initial: StateId,
    delta: Vec<StateId>,
    lambda: Vec<OutputId>,
}

impl MealyMachine {
    /// Builds a machine from dense tables indexed by `state * |I| + input`.
    ///
    /// Rejects incomplete tables, out-of-range indices and unreachable states.
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        state_names: Vec<String>,
        initial: StateId,
        delta: Vec<StateId>,
        lambda: Vec<OutputId>,
    ) -> Result<Self> {
        let n = state_names.len();
        let k = inputs.len();
        if n == 0 {
            return Err(Error::Malformed("machine has no states".into()));
        }
        if k == 0 {
            return Err(Error::Malformed("machine has no inputs".into()));
        }
        if initial >= n {
            return Err(Error::Malformed(format!("initial state {initial} out of range")));
        }
        if delta.len() != n * k || lambda.len() != n * k {
            return Err(Error::Malformed(format!(
                "transition tables must have {} entries",
                n * k
            )));
        }
        if let Some(t) = delta.iter().find(|&&t| t >= n) {
            return Err(Error::Malformed(format!("target state {t} out of range")));
        }
        if let Some(o) = lambda.iter().find(|&&o| o >= outputs.len()) {
            return Err(Error::Malformed(format!("output {o} out of range")));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = inputs.iter().find(|i| !seen.insert(i.as_str())) {
            return Err(Error::Malformed(format!("duplicate input symbol `{dup}`")));
        }
        let m = Self {
            inputs,
            outputs,
            state_names,
            initial,
            delta,
            lambda,
        };
        let reach = m.reachable();
        if let Some(s) = (0..n).find(|&s| !reach[s]) {
            return Err(Error::Malformed(format!(
                "state `{}` is unreachable from the initial state",
                m.state_names[s]
            )));
        }
        Ok(m)
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    #[inline]
    pub fn next(&self, s: StateId, i: InputId) -> StateId {
        self.delta[s * self.inputs.len() + i]
    }

    #[inline]
    pub fn output(&self, s: StateId, i: InputId) -> OutputId {
        self.lambda[s * self.inputs.len() + i]
    }

    pub fn output_name(&self, s: StateId, i: InputId) -> &str {
        &self.outputs[self.output(s, i)]
    }

    /// Dense index of transition `(s, i)`.
    #[inline]
    pub fn transition_index(&self, s: StateId, i: InputId) -> usize {
        s * self.inputs.len() + i
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.len()
    }

    pub fn input_index(&self, symbol: &str) -> Option<InputId> {
        self.inputs.iter().position(|x| x == symbol)
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|x| x == name)
    }

    /// Translates symbol names into a word, rejecting unknown symbols.
    pub fn word<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Word> {
        symbols
            .iter()
            .map(|s| {
                self.input_index(s.as_ref())
                    .ok_or_else(|| Error::UnknownInput(s.as_ref().to_string()))
            })
            .collect()
    }

    /// Parses a textual word. Symbols are separated by commas or whitespace;
    /// a single token that is not itself a symbol is split into characters.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let tokens: Vec<&str> = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() == 1 && self.input_index(tokens[0]).is_none() {
            let chars: Vec<String> = tokens[0].chars().map(String::from).collect();
            return self.word(&chars);
        }
        self.word(&tokens)
    }

    pub fn word_names(&self, w: &[InputId]) -> Vec<String> {
        w.iter().map(|&i| self.inputs[i].clone()).collect()
    }

    /// Runs `w` from the initial state.
    pub fn run(&self, w: &[InputId]) -> Result<(Vec<OutputId>, StateId)> {
        self.run_from(self.initial, w)
    }

    pub fn run_from(&self, start: StateId, w: &[InputId]) -> Result<(Vec<OutputId>, StateId)> {
        let mut s = start;
        let mut out = Vec::with_capacity(w.len());
        for &i in w {
            if i >= self.inputs.len() {
                return Err(Error::UnknownInput(format!("#{i}")));
            }
            out.push(self.output(s, i));
            s = self.next(s, i);
        }
        Ok((out, s))
    }

    /// Runs a word given by symbol names and returns output names.
    pub fn run_symbols<S: AsRef<str>>(&self, symbols: &[S]) -> Result<(Vec<String>, StateId)> {
        let w = self.word(symbols)?;
        let (out, s) = self.run(&w)?;
        Ok((out.into_iter().map(|o| self.outputs[o].clone()).collect(), s))
    }

    pub fn state_after(&self, start: StateId, w: &[InputId]) -> StateId {
        w.iter().fold(start, |s, &i| self.next(s, i))
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for i in 0..self.num_inputs() {
                let t = self.next(s, i);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// BFS order over states from the initial state, inputs in order.
    pub fn bfs_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            for i in 0..self.num_inputs() {
                let t = self.next(s, i);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
        }
        order
    }

    /// Shortest access word (shortlex-least) for every state.
    pub fn access_words(&self) -> Vec<Word> {
        let mut words: Vec<Option<Word>> = vec![None; self.num_states()];
        words[self.initial] = Some(Vec::new());
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for i in 0..self.num_inputs() {
                let t = self.next(s, i);
                if words[t].is_none() {
                    let mut w = words[s].clone().unwrap();
                    w.push(i);
                    words[t] = Some(w);
                    queue.push_back(t);
                }
            }
        }
        words.into_iter().map(|w| w.expect("reachable")).collect()
    }

    /// Renumbers states in BFS order; names become `s0`, `s1`, ...
    pub fn canonical(&self) -> MealyMachine {
        let order = self.bfs_order();
        self.quotient(&order, |_, new| format!("s{new}"))
    }

    /// Relabels into BFS order keeping the original state names.
    pub fn bfs_renumbered(&self) -> MealyMachine {
        let order = self.bfs_order();
        self.quotient(&order, |old, _| self.state_names[old].clone())
    }

    /// Builds the machine whose states are `representatives` (in that order),
    /// mapping every target through the BFS-order position of its block.
    fn quotient(
        &self,
        order: &[StateId],
        name: impl Fn(StateId, usize) -> String,
    ) -> MealyMachine {
        let mut pos = vec![usize::MAX; self.num_states()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let k = self.num_inputs();
        let mut delta = Vec::with_capacity(order.len() * k);
        let mut lambda = Vec::with_capacity(order.len() * k);
        for &old in order {
            for i in 0..k {
                delta.push(pos[self.next(old, i)]);
                lambda.push(self.output(old, i));
            }
        }
        MealyMachine {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            state_names: order
                .iter()
                .enumerate()
                .map(|(new, &old)| name(old, new))
                .collect(),
            initial: 0,
            delta,
            lambda,
        }
    }

    /// Quotient by a state partition given as block ids. The partition must be
    /// a congruence (same block ⇒ same outputs and successor blocks).
    pub fn quotient_by(&self, block_of: &[usize]) -> MealyMachine {
        let nb = block_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut rep = vec![usize::MAX; nb];
        for (s, &b) in block_of.iter().enumerate() {
            if rep[b] == usize::MAX {
                rep[b] = s;
            }
        }
        let k = self.num_inputs();
        let mut delta = Vec::with_capacity(nb * k);
        let mut lambda = Vec::with_capacity(nb * k);
        for &r in &rep {
            for i in 0..k {
                delta.push(block_of[self.next(r, i)]);
                lambda.push(self.output(r, i));
            }
        }
        let names = rep.iter().map(|&r| self.state_names[r].clone()).collect();
        let q = MealyMachine {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            state_names: names,
            initial: block_of[self.initial],
            delta,
            lambda,
        };
        q.bfs_renumbered()
    }

    /// Iterates `(src, input, output, dst)`.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, InputId, OutputId, StateId)> + '_ {
        let k = self.num_inputs();
        (0..self.delta.len()).map(move |t| (t / k, t % k, self.lambda[t], self.delta[t]))
    }


    pub fn with_state_names(mut self, names: Vec<String>) -> MealyMachine {
        assert_eq!(names.len(), self.num_states());
        self.state_names = names;
        self
    }
}

/// Incremental construction from named states and symbols.
#[derive(Clone, Debug, Default)]
pub struct MealyBuilder {
    inputs: Vec<String>,
    outputs: Vec<String>,
    states: Vec<String>,
    initial: Option<usize>,
    edges: HashMap<(usize, usize), (usize, usize)>,
}

impl MealyBuilder {
    pub fn new<S: AsRef<str>>(inputs: &[S]) -> Self {
        Self {
            inputs: inputs.iter().map(|s| s.as_ref().to_string()).collect(),
            ..Default::default()
        }
    }

    fn intern(table: &mut Vec<String>, name: &str) -> usize {
        match table.iter().position(|x| x == name) {
            Some(i) => i,
            None => {
                table.push(name.to_string());
                table.len() - 1
            }
        }
    }

    pub fn state(&mut self, name: &str) -> usize {
        Self::intern(&mut self.states, name)
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        let s = self.state(name);
        self.initial = Some(s);
        self
    }

    /// Adds an input symbol unless already present.
    pub fn input(&mut self, name: &str) -> usize {
        Self::intern(&mut self.inputs, name)
    }

    pub fn transition(&mut self, src: &str, input: &str, output: &str, dst: &str) -> Result<&mut Self> {
        let s = self.state(src);
        let t = self.state(dst);
        let i = self
            .inputs
            .iter()
            .position(|x| x == input)
            .ok_or_else(|| Error::UnknownInput(input.to_string()))?;
        let o = Self::intern(&mut self.outputs, output);
        if self.edges.insert((s, i), (o, t)).is_some() {
            return Err(Error::Nondeterministic {
                state: src.to_string(),
                input: input.to_string(),
            });
        }
        Ok(self)
    }

    /// Finishes construction. Only states reachable from the initial state
    /// are kept. Missing transitions are an error unless `complete_sink` is
    /// set, in which case they lead to a fresh sink answering [`SINK_OUTPUT`].
    pub fn build(mut self, complete_sink: bool) -> Result<MealyMachine> {
        let initial = self.initial.ok_or(Error::MissingStart)?;
        let k = self.inputs.len();
        let mut seen = vec![false; self.states.len()];
        seen[initial] = true;
        let mut queue = VecDeque::from([initial]);
        while let Some(s) = queue.pop_front() {
            for i in 0..k {
                if let Some(&(_, t)) = self.edges.get(&(s, i)) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..self.states.len()).filter(|&s| seen[s]).collect();
        let missing: Vec<(usize, usize)> = order
            .iter()
            .flat_map(|&s| (0..k).map(move |i| (s, i)))
            .filter(|key| !self.edges.contains_key(key))
            .collect();
        if let Some(&(s, i)) = missing.first() {
            if !complete_sink {
                return Err(Error::Partial {
                    state: self.states[s].clone(),
                    input: self.inputs[i].clone(),
                });
            }
            let mut sink_name = String::from("sink");
            while self.states.contains(&sink_name) {
                sink_name.push('_');
            }
            let sink = self.state(&sink_name);
            let o = Self::intern(&mut self.outputs, SINK_OUTPUT);
            for (s, i) in missing.into_iter().chain((0..k).map(|i| (sink, i))) {
                self.edges.insert((s, i), (o, sink));
            }
            order.push(sink);
        }
        let mut pos = vec![usize::MAX; self.states.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        // Outputs are numbered by first use in state order; outputs that only
        // occur on pruned states are dropped.
        let mut out_pos = vec![usize::MAX; self.outputs.len()];
        let mut outputs = Vec::new();
        for &s in &order {
            for i in 0..k {
                let o = self.edges[&(s, i)].0;
                if out_pos[o] == usize::MAX {
                    out_pos[o] = outputs.len();
                    outputs.push(self.outputs[o].clone());
                }
            }
        }
        let mut delta = Vec::with_capacity(order.len() * k);
        let mut lambda = Vec::with_capacity(order.len() * k);
        for &s in &order {
            for i in 0..k {
                let (o, t) = self.edges[&(s, i)];
                delta.push(pos[t]);
                lambda.push(out_pos[o]);
            }
        }
        MealyMachine::new(
            self.inputs,
            outputs,
            order.iter().map(|&s| self.states[s].clone()).collect(),
            pos[initial],
            delta,
            lambda,
        )
    }
}

/// Builds a machine from `(src, input, output, dst)` rows; the first source is initial.
pub fn machine_from_rows<S: AsRef<str>>(inputs: &[S], rows: &[(&str, &str, &str, &str)]) -> Result<MealyMachine> {
    let mut b = MealyBuilder::new(inputs);
    if let Some(first) = rows.first() {
        b.initial(first.0);
    }
    for &(s, i, o, t) in rows {
        b.transition(s, i, o, t)?;
    }
    b.build(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn run_m_prime_ab() {
        let m = models::m_prime();
        let (out, s) = m.run_symbols(&["a", "b"]).unwrap();
        assert_eq!(out, vec!["A", "C"]);
        assert_eq!(m.state_name(s), "s2");
    }

    #[test]
    fn run_empty_word() {
        let m = models::test_m1();
        let (out, s) = m.run(&[]).unwrap();
        assert!(out.is_empty());
        assert_eq!(s, m.initial());
    }

    #[test]
    fn run_test_m1_aaa() {
        let m = models::test_m1();
        let (out, s) = m.run_symbols(&["a", "a", "a"]).unwrap();
        assert_eq!(out, vec!["A", "B", "C"]);
        assert_eq!(m.state_name(s), "s00");
    }

    #[test]
    fn run_rejects_unknown_symbol() {
        let m = models::m_prime();
        match m.run_symbols(&["a", "z"]) {
            Err(Error::UnknownInput(s)) => assert_eq!(s, "z"),
            other => panic!("expected unknown input, got {other:?}"),
        }
    }

    #[test]
    fn parse_word_splits_characters() {
        let m = models::m_prime();
        assert_eq!(m.parse_word("ab").unwrap(), vec![0, 1]);
        assert_eq!(m.parse_word("a,b,b").unwrap(), vec![0, 1, 1]);
        assert!(m.parse_word("ax").is_err());
    }

    #[test]
    fn builder_rejects_duplicate_edges() {
        let mut b = MealyBuilder::new(&["a"]);
        b.initial("s");
        b.transition("s", "a", "x", "s").unwrap();
        assert!(matches!(
            b.transition("s", "a", "y", "s"),
            Err(Error::Nondeterministic { .. })
        ));
    }

    #[test]
    fn builder_completes_with_sink_on_request() {
        let mut b = MealyBuilder::new(&["a", "b"]);
        b.initial("s");
        b.transition("s", "a", "x", "s").unwrap();
        assert!(matches!(b.clone().build(false), Err(Error::Partial { .. })));
        let m = b.build(true).unwrap();
        assert_eq!(m.num_states(), 2);
        let (out, _) = m.run_symbols(&["b", "a"]).unwrap();
        assert_eq!(out, vec![SINK_OUTPUT, SINK_OUTPUT]);
    }

    #[test]
    fn unreachable_states_are_pruned_by_builder() {
        let mut b = MealyBuilder::new(&["a"]);
        b.initial("s");
        b.transition("s", "a", "x", "s").unwrap();
        b.transition("u", "a", "x", "s").unwrap();
        assert_eq!(b.build(false).unwrap().num_states(), 1);
    }

    #[test]
    fn new_rejects_unreachable() {
        let r = MealyMachine::new(
            vec!["a".into()],
            vec!["x".into()],
            vec!["p".into(), "q".into()],
            0,
            vec![0, 0],
            vec![0, 0],
        );
        assert!(matches!(r, Err(Error::Malformed(_))));
    }
}
