//! Equivalence oracles. All test executions go through the learner's session
//! so they are charged to the experiment.

use std::collections::VecDeque;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{io_equivalent, Counterexample, MealyMachine, StateId, Word};
use crate::error::{Error, Result};
use crate::mdm::SulSession;

pub trait EquivalenceOracle {
    /// A word on which the SUL and `hypothesis` disagree, if one is found.
    fn find_counterexample(
        &mut self,
        hypothesis: &MealyMachine,
        session: &mut SulSession,
    ) -> Result<Option<Counterexample>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleConfig {
    Perfect,
    WMethod { e: usize },
    RandomWalk { max_len: usize, n_walks: usize, seed: u64 },
}

impl FromStr for OracleConfig {
    type Err = Error;

    /// `perfect`, `wmethod:E` or `walk:LEN,N,SEED`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown oracle `{s}`"));
        if s == "perfect" {
            return Ok(OracleConfig::Perfect);
        }
        if let Some(e) = s.strip_prefix("wmethod:") {
            return Ok(OracleConfig::WMethod {
                e: e.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("walk:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let max_len = parts[0].parse().map_err(|_| bad())?;
            let n_walks: usize = parts[1].parse().map_err(|_| bad())?;
            let seed = parts[2].parse().map_err(|_| bad())?;
            if n_walks == 0 || max_len == 0 {
                return Err(Error::InvalidArgument("random walks need positive length and count".into()));
            }
            return Ok(OracleConfig::RandomWalk { max_len, n_walks, seed });
        }
        Err(bad())
    }
}

/// Builds the oracle. The perfect oracle needs the ground-truth structure.
pub fn build_oracle(cfg: OracleConfig, truth: Option<&MealyMachine>) -> Result<Box<dyn EquivalenceOracle + Send>> {
    Ok(match cfg {
        OracleConfig::Perfect => Box::new(PerfectOracle::new(
            truth
                .ok_or_else(|| Error::InvalidArgument("the perfect oracle needs a known ground truth".into()))?
                .clone(),
        )),
        OracleConfig::WMethod { e } => Box::new(WMethodOracle::new(e)),
        OracleConfig::RandomWalk { max_len, n_walks, seed } => Box::new(RandomWalkOracle::new(max_len, n_walks, seed)),
    })
}

/// Compares against the known structure; expected outputs come from the truth.
pub fn perfect_eq(hypothesis: &MealyMachine, truth: &MealyMachine) -> Result<Option<Counterexample>> {
    io_equivalent(truth, hypothesis)
}

pub struct PerfectOracle {
    truth: MealyMachine,
}

impl PerfectOracle {
    pub fn new(truth: MealyMachine) -> Self {
        Self { truth }
    }
}

impl EquivalenceOracle for PerfectOracle {
    fn find_counterexample(&mut self, hypothesis: &MealyMachine, _: &mut SulSession) -> Result<Option<Counterexample>> {
        perfect_eq(hypothesis, &self.truth)
    }
}

/// Shortest shortlex-least word distinguishing `p` and `q`, if any.
fn distinguishing_word(m: &MealyMachine, p: StateId, q: StateId) -> Option<Word> {
    let n = m.num_states();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n * n];
    let mut seen = vec![false; n * n];
    let start = p * n + q;
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let path = |parent: &[Option<(usize, usize)>], mut c: usize| {
        let mut w = Vec::new();
        while let Some((prev, i)) = parent[c] {
            w.push(i);
            c = prev;
        }
        w.reverse();
        w
    };
    while let Some(c) = queue.pop_front() {
        let (a, b) = (c / n, c % n);
        for i in 0..m.num_inputs() {
            if m.output(a, i) != m.output(b, i) {
                let mut w = path(&parent, c);
                w.push(i);
                return Some(w);
            }
        }
        for i in 0..m.num_inputs() {
            let t = m.next(a, i) * n + m.next(b, i);
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((c, i));
                queue.push_back(t);
            }
        }
    }
    None
}

fn distinguishes(m: &MealyMachine, p: StateId, q: StateId, w: &[usize]) -> bool {
    m.run_from(p, w).unwrap().0 != m.run_from(q, w).unwrap().0
}

/// Characterization set: every single input, then greedily the shortest
/// distinguishing suffix of each pair still undistinguished.
pub fn characterization_set(m: &MealyMachine) -> Vec<Word> {
    let mut w: Vec<Word> = (0..m.num_inputs()).map(|i| vec![i]).collect();
    let n = m.num_states();
    for p in 0..n {
        for q in p + 1..n {
            if w.iter().any(|x| distinguishes(m, p, q, x)) {
                continue;
            }
            if let Some(x) = distinguishing_word(m, p, q) {
                w.push(x);
            }
        }
    }
    w
}

fn words_up_to(k: usize, max_len: usize) -> Vec<Word> {
    let mut all = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for i in 0..k {
                let mut x: Word = w.clone();
                x.push(i);
                next.push(x);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// `P · I^{≤e+1} · W` with `P` the BFS access words (including ε), in
/// generation order with duplicates removed.
pub fn wmethod_suite(hypothesis: &MealyMachine, e: usize) -> Vec<Word> {
    let access = hypothesis.access_words();
    let order = hypothesis.bfs_order();
    let middle = words_up_to(hypothesis.num_inputs(), e + 1);
    let w = characterization_set(hypothesis);
    let mut seen = std::collections::HashSet::new();
    let mut suite = Vec::new();
    for &s in &order {
        for m in &middle {
            for x in &w {
                let mut word = access[s].clone();
                word.extend_from_slice(m);
                word.extend_from_slice(x);
                if seen.insert(word.clone()) {
                    suite.push(word);
                }
            }
        }
    }
    suite
}

/// Runs `word` on the SUL and returns the shortest disagreeing prefix.
fn check_word(hypothesis: &MealyMachine, session: &mut SulSession, word: &[usize]) -> Result<Option<Counterexample>> {
    let (sul, _) = session.query(word)?;
    let (hyp, _) = hypothesis.run(word)?;
    for (j, (a, &b)) in sul.iter().zip(&hyp).enumerate() {
        if a != &hypothesis.outputs()[b] {
            let cut = j + 1;
            let actual = hyp[..cut].iter().map(|&o| hypothesis.outputs()[o].clone()).collect();
            return Ok(Some(Counterexample::new(word[..cut].to_vec(), sul[..cut].to_vec(), actual)?));
        }
    }
    Ok(None)
}

pub struct WMethodOracle {
    e: usize,
}

impl WMethodOracle {
    pub fn new(e: usize) -> Self {
        Self { e }
    }
}

impl EquivalenceOracle for WMethodOracle {
    fn find_counterexample(&mut self, hypothesis: &MealyMachine, session: &mut SulSession) -> Result<Option<Counterexample>> {
        for word in wmethod_suite(hypothesis, self.e) {
            if let Some(cex) = check_word(hypothesis, session, &word)? {
                return Ok(Some(cex));
            }
        }
        Ok(None)
    }
}

pub struct RandomWalkOracle {
    max_len: usize,
    n_walks: usize,
    rng: ChaCha8Rng,
}

impl RandomWalkOracle {
    pub fn new(max_len: usize, n_walks: usize, seed: u64) -> Self {
        Self {
            max_len,
            n_walks,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl EquivalenceOracle for RandomWalkOracle {
    fn find_counterexample(&mut self, hypothesis: &MealyMachine, session: &mut SulSession) -> Result<Option<Counterexample>> {
        let k = hypothesis.num_inputs();
        for _ in 0..self.n_walks {
            let len = self.rng.gen_range(1..=self.max_len);
            let word: Word = (0..len).map(|_| self.rng.gen_range(0..k)).collect();
            if let Some(cex) = check_word(hypothesis, session, &word)? {
                return Ok(Some(cex));
            }
        }
        Ok(None)
    }
}
