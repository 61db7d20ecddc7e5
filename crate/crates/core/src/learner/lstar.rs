use crate::automata::{Counterexample, InputId, MealyMachine, Word};
use crate::error::{Error, Result};
use crate::mdm::SulSession;
use crate::oracles::EquivalenceOracle;
use crate::stats::EqualityTest;

use super::tree::{NodeId, ObservationTree};
use super::SampleLog;

/// How the table samples and compares rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableConfig {
    /// Executions required for row words and for tests of length `<= d`.
    pub k: u64,
    /// Horizon of delay comparison; tests up to this length start in `T`.
    pub d: usize,
    /// Compare delays in addition to outputs.
    pub delay_test: Option<EqualityTest>,
}

impl TableConfig {
    /// Classic Mealy L*: every word once, outputs only.
    pub fn plain() -> Self {
        Self {
            k: 1,
            d: 0,
            delay_test: None,
        }
    }
}

/// Rows are indexed by access words `Q` and their one-letter extensions.
#[derive(Clone, Debug)]
pub struct ObservationTable {
    num_inputs: usize,
    access: Vec<Word>,
    tests: Vec<Word>,
    delay_words: Vec<Word>,
    tree: ObservationTree,
    cfg: TableConfig,
}

struct RowInfo {
    outputs: Vec<u32>,
    delay_nodes: Vec<NodeId>,
}

fn all_words(k: usize, min_len: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Word> = vec![Vec::new()];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..k {
                let mut x = w.clone();
                x.push(i);
                next.push(x);
            }
        }
        if len >= min_len {
            out.extend(next.iter().cloned());
        }
        layer = next;
    }
    out
}

impl ObservationTable {
    /// `T` starts as all non-empty words up to length `max(d, 1)`.
    pub fn new(num_inputs: usize, cfg: TableConfig) -> Self {
        let delay_words = if cfg.delay_test.is_some() {
            all_words(num_inputs, 1, cfg.d)
        } else {
            Vec::new()
        };
        Self {
            num_inputs,
            access: vec![Vec::new()],
            tests: all_words(num_inputs, 1, cfg.d.max(1)),
            delay_words,
            tree: ObservationTree::new(num_inputs),
            cfg,
        }
    }

    pub fn access(&self) -> &[Word] {
        &self.access
    }

    pub fn tests(&self) -> &[Word] {
        &self.tests
    }

    pub fn tree(&self) -> &ObservationTree {
        &self.tree
    }

    fn sampled(&self) -> bool {
        self.cfg.delay_test.is_some()
    }

    fn multiplicity(&self, test: &[InputId]) -> u64 {
        if self.sampled() && test.len() <= self.cfg.d {
            self.cfg.k
        } else {
            1
        }
    }

    fn row_words(&self) -> Vec<Word> {
        let mut rows = self.access.clone();
        for u in &self.access {
            for i in 0..self.num_inputs {
                let mut w = u.clone();
                w.push(i);
                if !self.access.contains(&w) {
                    rows.push(w);
                }
            }
        }
        rows
    }

    /// Executes whatever the current rows and tests still need.
    pub fn fill(&mut self, session: &mut SulSession) -> Result<()> {
        let mut requests = Vec::new();
        for u in self.row_words() {
            if self.sampled() && !u.is_empty() {
                requests.push((u.clone(), self.cfg.k));
            }
            for t in &self.tests {
                let mut w = u.clone();
                w.extend_from_slice(t);
                requests.push((w, self.multiplicity(t)));
            }
        }
        self.tree.ensure_all(session, requests)
    }

    fn row(&self, u: &[InputId]) -> RowInfo {
        let mut outputs = Vec::new();
        let mut w = u.to_vec();
        for t in &self.tests {
            w.truncate(u.len());
            w.extend_from_slice(t);
            let known = self.tree.suffix_outputs(&w, t.len(), &mut outputs);
            debug_assert!(known, "row queried before fill");
        }
        let delay_nodes = self
            .delay_words
            .iter()
            .map(|x| {
                w.truncate(u.len());
                w.extend_from_slice(x);
                self.tree.lookup(&w).expect("filled")
            })
            .collect();
        RowInfo { outputs, delay_nodes }
    }

    fn rows_equal(&self, a: &RowInfo, b: &RowInfo) -> bool {
        if a.outputs != b.outputs {
            return false;
        }
        let Some(test) = &self.cfg.delay_test else {
            return true;
        };
        a.delay_nodes.iter().zip(&b.delay_nodes).all(|(&x, &y)| {
            let (sx, sy) = (self.tree.samples(x), self.tree.samples(y));
            match (self.tree.mean(x), self.tree.mean(y)) {
                (Some(mx), Some(my)) => test.equal_with_means(sx, mx, sy, my).unwrap_or(true),
                _ => true,
            }
        })
    }

    /// Fills and extends `Q` until every one-letter extension matches a row of `Q`.
    pub fn close(&mut self, session: &mut SulSession) -> Result<()> {
        loop {
            self.fill(session)?;
            let q_rows: Vec<RowInfo> = self.access.iter().map(|u| self.row(u)).collect();
            let mut missing = None;
            'search: for u in &self.access {
                for i in 0..self.num_inputs {
                    let mut w = u.clone();
                    w.push(i);
                    if self.access.contains(&w) {
                        continue;
                    }
                    let r = self.row(&w);
                    if !q_rows.iter().any(|q| self.rows_equal(q, &r)) {
                        missing = Some(w);
                        break 'search;
                    }
                }
            }
            match missing {
                Some(w) => self.access.push(w),
                None => return Ok(()),
            }
        }
    }

    /// Hypothesis over the closed table: one state per access word.
    pub fn hypothesis(&self, inputs: &[String]) -> MealyMachine {
        let q_rows: Vec<RowInfo> = self.access.iter().map(|u| self.row(u)).collect();
        let k = self.num_inputs;
        let mut delta = Vec::with_capacity(self.access.len() * k);
        let mut lambda = Vec::with_capacity(self.access.len() * k);
        for u in &self.access {
            for i in 0..k {
                let mut w = u.clone();
                w.push(i);
                let target = match self.access.iter().position(|q| *q == w) {
                    Some(t) => t,
                    None => {
                        let r = self.row(&w);
                        q_rows
                            .iter()
                            .position(|q| self.rows_equal(q, &r))
                            .expect("table is closed")
                    }
                };
                delta.push(target);
                lambda.push(self.tree.output(self.tree.lookup(&w).expect("filled")) as usize);
            }
        }
        let outputs = self.tree.symbols().to_vec();
        let names = self
            .access
            .iter()
            .map(|u| {
                if u.is_empty() {
                    "ε".to_string()
                } else {
                    u.iter().map(|&i| inputs[i].as_str()).collect::<Vec<_>>().join("·")
                }
            })
            .collect();
        MealyMachine::new(inputs.to_vec(), outputs, names, 0, delta, lambda).expect("well-formed hypothesis")
    }

    /// Adds every suffix of the counterexample to `T`. Rejects words on which
    /// `hypothesis` already produces the expected outputs.
    pub fn process_counterexample(&mut self, hypothesis: &MealyMachine, cex: &Counterexample) -> Result<()> {
        if cex.word.len() != cex.expected.len() {
            return Err(Error::LengthMismatch("counterexample outputs".into()));
        }
        let predicted = hypothesis.run(&cex.word)?.0;
        let predicted: Vec<&str> = predicted.iter().map(|&o| hypothesis.outputs()[o].as_str()).collect();
        if predicted == cex.expected {
            return Err(Error::NotACounterexample(hypothesis.word_names(&cex.word)));
        }
        for start in (0..cex.word.len()).rev() {
            let suffix = cex.word[start..].to_vec();
            if !self.tests.contains(&suffix) {
                self.tests.push(suffix);
            }
        }
        Ok(())
    }

    /// Delay samples of transition `(q, i)` of the hypothesis.
    pub fn transition_samples(&self, q: usize, i: InputId) -> &[f64] {
        let mut w = self.access[q].clone();
        w.push(i);
        self.tree.samples(self.tree.lookup(&w).expect("filled"))
    }
}

/// Outcome of a learning run.
#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub hypothesis: MealyMachine,
    pub table: ObservationTable,
    /// Runs executed on the session during learning (including oracle tests).
    pub log: SampleLog,
    pub equivalence_queries: usize,
    pub eq_steps: u64,
    pub eq_resets: u64,
}

/// Generic L* loop over a table configuration.
pub fn learn_with_table(
    session: &mut SulSession,
    oracle: &mut dyn EquivalenceOracle,
    cfg: TableConfig,
) -> Result<LearnOutcome> {
    let inputs = session.inputs().to_vec();
    let mut table = ObservationTable::new(inputs.len(), cfg);
    let (mut eq_steps, mut eq_resets, mut rounds) = (0, 0, 0);
    loop {
        table.close(session)?;
        let hyp = table.hypothesis(&inputs);
        rounds += 1;
        let (s0, r0) = (session.steps(), session.resets());
        let cex = oracle.find_counterexample(&hyp, session)?;
        eq_steps += session.steps() - s0;
        eq_resets += session.resets() - r0;
        match cex {
            None => {
                return Ok(LearnOutcome {
                    hypothesis: hyp,
                    table,
                    log: SampleLog::default(),
                    equivalence_queries: rounds,
                    eq_steps,
                    eq_resets,
                })
            }
            Some(cex) => table.process_counterexample(&hyp, &cex)?,
        }
    }
}

/// Plain Mealy L* with all-suffix counterexample handling. Every session
/// interaction, oracle tests included, is returned in the log.
pub fn lstar_learn(session: &mut SulSession, oracle: &mut dyn EquivalenceOracle) -> Result<LearnOutcome> {
    session.start_recording();
    let result = learn_with_table(session, oracle, TableConfig::plain());
    let log = session.take_log();
    session.stop_recording();
    let mut outcome = result?;
    outcome.log = log;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{io_equivalent, is_isomorphic, machine_from_rows};
    use crate::mdm::make_random_mdm;
    use crate::models;
    use crate::oracles::PerfectOracle;

    fn session_for(m: &MealyMachine) -> SulSession {
        SulSession::simulate(make_random_mdm(m, 1, (0.5, 2.0)), 2)
    }

    #[test]
    fn learns_m_prime_from_test_m1() {
        let truth = models::test_m1();
        let mut s = session_for(&truth);
        let mut oracle = PerfectOracle::new(truth.clone());
        let out = lstar_learn(&mut s, &mut oracle).unwrap();
        assert!(is_isomorphic(&out.hypothesis, &models::m_prime()));
        assert_eq!(out.log.steps() as u64, s.steps());
    }

    #[test]
    fn single_state_needs_no_counterexample() {
        let truth = machine_from_rows(&["a", "b"], &[("q", "a", "x", "q"), ("q", "b", "y", "q")]).unwrap();
        let mut s = session_for(&truth);
        let mut oracle = PerfectOracle::new(truth.clone());
        let out = lstar_learn(&mut s, &mut oracle).unwrap();
        assert_eq!(out.equivalence_queries, 1);
        assert_eq!(out.table.access().len(), 1);
    }

    #[test]
    fn counterexample_suffixes() {
        let truth = models::m_prime();
        let mut s = session_for(&truth);
        let mut table = ObservationTable::new(2, TableConfig::plain());
        // Only input a in T so the first hypothesis can be too small.
        table.tests = vec![vec![0]];
        table.close(&mut s).unwrap();
        let hyp = table.hypothesis(truth.inputs());
        let word = vec![0, 0, 0];
        let expected = truth.run_symbols(&["a", "a", "a"]).unwrap().0;
        let actual: Vec<String> = hyp.run(&word).unwrap().0.iter().map(|&o| hyp.outputs()[o].clone()).collect();
        if expected == actual {
            // Not a counterexample for this hypothesis: must be rejected.
            let cex = Counterexample { word, expected, actual };
            assert!(table.process_counterexample(&hyp, &cex).is_err());
            return;
        }
        let cex = Counterexample::new(word, expected, actual).unwrap();
        table.process_counterexample(&hyp, &cex).unwrap();
        assert!(table.tests().contains(&vec![0, 0]) && table.tests().contains(&vec![0, 0, 0]));
        let before = table.tests().to_vec();
        table.process_counterexample(&hyp, &cex).unwrap();
        assert_eq!(table.tests(), &before[..]);
    }

    #[test]
    fn rejects_non_counterexample() {
        let truth = models::m_prime();
        let mut s = session_for(&truth);
        let mut table = ObservationTable::new(2, TableConfig::plain());
        table.close(&mut s).unwrap();
        let hyp = table.hypothesis(truth.inputs());
        let out: Vec<String> = hyp.run(&[0, 1]).unwrap().0.iter().map(|&o| hyp.outputs()[o].clone()).collect();
        let fake = Counterexample {
            word: vec![0, 1],
            expected: out.clone(),
            actual: out,
        };
        assert!(matches!(
            table.process_counterexample(&hyp, &fake),
            Err(Error::NotACounterexample(_))
        ));
    }

    #[test]
    fn hypothesis_grows_after_counterexample() {
        let truth = models::alternating_split();
        let min = crate::automata::minimize(&truth);
        let mut s = session_for(&truth);
        let mut table = ObservationTable::new(2, TableConfig::plain());
        table.tests = vec![vec![1]];
        let mut last = 0;
        for _ in 0..=min.num_states() {
            table.close(&mut s).unwrap();
            let hyp = table.hypothesis(truth.inputs());
            assert!(hyp.num_states() > last);
            last = hyp.num_states();
            match io_equivalent(&truth, &hyp).unwrap() {
                None => break,
                Some(cex) => table.process_counterexample(&hyp, &cex).unwrap(),
            }
        }
        assert_eq!(last, 3);
    }
}
