use std::collections::HashMap;

use crate::automata::InputId;
use crate::error::{Error, Result};
use crate::mdm::SulSession;

const NONE: usize = usize::MAX;

/// Prefix tree of everything executed so far. Executing a word credits all of
/// its prefixes: each node counts how often its prefix was run and keeps the
/// delay observed on its last input.
#[derive(Clone, Debug)]
pub struct ObservationTree {
    k: usize,
    children: Vec<usize>,
    output: Vec<u32>,
    visits: Vec<u64>,
    samples: Vec<Vec<f64>>,
    sums: Vec<f64>,
    symbols: Vec<String>,
    symbol_ids: HashMap<String, u32>,
}

pub type NodeId = usize;

impl ObservationTree {
    pub fn new(num_inputs: usize) -> Self {
        Self {
            k: num_inputs,
            children: vec![NONE; num_inputs],
            output: vec![u32::MAX],
            visits: vec![0],
            samples: vec![Vec::new()],
            sums: vec![0.0],
            symbols: Vec::new(),
            symbol_ids: HashMap::new(),
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn num_nodes(&self) -> usize {
        self.visits.len()
    }

    pub fn child(&self, n: NodeId, i: InputId) -> Option<NodeId> {
        let c = self.children[n * self.k + i];
        (c != NONE).then_some(c)
    }

    pub fn lookup(&self, word: &[InputId]) -> Option<NodeId> {
        word.iter().try_fold(0, |n, &i| self.child(n, i))
    }

    pub fn visits(&self, n: NodeId) -> u64 {
        self.visits[n]
    }

    /// Interned output of the last input leading to `n`.
    pub fn output(&self, n: NodeId) -> u32 {
        self.output[n]
    }

    /// Every output seen so far, indexed by interned id.
    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn output_name(&self, id: u32) -> &str {
        &self.symbols[id as usize]
    }

    pub fn samples(&self, n: NodeId) -> &[f64] {
        &self.samples[n]
    }

    pub fn mean(&self, n: NodeId) -> Option<f64> {
        let c = self.samples[n].len();
        (c > 0).then(|| self.sums[n] / c as f64)
    }

    /// Outputs of the last `len` inputs of `word`, if the word is known.
    pub fn suffix_outputs(&self, word: &[InputId], len: usize, out: &mut Vec<u32>) -> bool {
        let mut n = 0;
        for (j, &i) in word.iter().enumerate() {
            match self.child(n, i) {
                Some(c) => n = c,
                None => return false,
            }
            if j + len >= word.len() {
                out.push(self.output[n]);
            }
        }
        true
    }

    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.symbol_ids.get(s) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(s.to_string());
        self.symbol_ids.insert(s.to_string(), id);
        id
    }

    fn record(&mut self, word: &[InputId], outs: &[String], delays: &[f64], names: &[String]) -> Result<()> {
        let mut n = 0;
        self.visits[0] += 1;
        for ((&i, o), &d) in word.iter().zip(outs).zip(delays) {
            let o = self.intern(o);
            let c = match self.child(n, i) {
                Some(c) => {
                    if self.output[c] != o {
                        return Err(Error::InconsistentSul {
                            word: word.iter().map(|&i| names[i].clone()).collect(),
                        });
                    }
                    c
                }
                None => {
                    let c = self.visits.len();
                    self.children[n * self.k + i] = c;
                    self.children.extend(std::iter::repeat_n(NONE, self.k));
                    self.output.push(o);
                    self.visits.push(0);
                    self.samples.push(Vec::new());
                    self.sums.push(0.0);
                    c
                }
            };
            self.visits[c] += 1;
            self.samples[c].push(d);
            self.sums[c] += d;
            n = c;
        }
        Ok(())
    }

    /// Executes `word` until its node has been visited at least `times` times.
    pub fn ensure(&mut self, session: &mut SulSession, word: &[InputId], times: u64) -> Result<NodeId> {
        let have = self.lookup(word).map_or(0, |n| self.visits[n]);
        for _ in have..times {
            let (outs, delays) = session.query(word)?;
            let names = session.inputs().to_vec();
            self.record(word, &outs, &delays, &names)?;
        }
        Ok(self.lookup(word).expect("executed at least once"))
    }

    /// Runs a batch of requests, longest words first so that shorter ones are
    /// usually satisfied by prefix credit.
    pub fn ensure_all(&mut self, session: &mut SulSession, mut requests: Vec<(Vec<InputId>, u64)>) -> Result<()> {
        requests.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        for (w, m) in requests {
            self.ensure(session, &w, m)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdm::make_random_mdm;
    use crate::models;

    fn session() -> SulSession {
        SulSession::simulate(make_random_mdm(&models::m_prime(), 1, (1.0, 2.0)), 3)
    }

    #[test]
    fn prefixes_are_credited() {
        let mut s = session();
        let mut t = ObservationTree::new(2);
        t.ensure(&mut s, &[0, 1, 0], 3).unwrap();
        let before = s.actions();
        t.ensure(&mut s, &[0, 1], 3).unwrap();
        assert_eq!(s.actions(), before);
        t.ensure(&mut s, &[0, 1], 5).unwrap();
        assert_eq!(s.resets(), 5);
        let n = t.lookup(&[0, 1]).unwrap();
        assert_eq!(t.visits(n), 5);
        assert_eq!(t.samples(n).len(), 5);
        assert_eq!(t.output_name(t.output(n)), "C");
    }

    #[test]
    fn suffix_outputs() {
        let mut s = session();
        let mut t = ObservationTree::new(2);
        t.ensure(&mut s, &[0, 1, 0], 1).unwrap();
        let mut out = Vec::new();
        assert!(t.suffix_outputs(&[0, 1, 0], 2, &mut out));
        let names: Vec<&str> = out.iter().map(|&o| t.output_name(o)).collect();
        assert_eq!(names, vec!["C", "C"]);
        assert!(!t.suffix_outputs(&[1], 1, &mut out));
    }
}
