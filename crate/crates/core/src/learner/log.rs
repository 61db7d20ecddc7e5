use crate::automata::{MealyMachine, Word};
use crate::error::{Error, Result};

/// One reset-to-reset execution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Run {
    pub word: Word,
    pub outputs: Vec<String>,
    pub delays: Vec<f64>,
}

/// Every run executed on a session while recording was on.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleLog {
    runs: Vec<Run>,
}

/// Delay samples per transition of some reference machine.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSamples {
    samples: Vec<Vec<f64>>,
}

impl SampleLog {
    pub fn push(&mut self, run: Run) {
        self.runs.push(run);
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn extend(&mut self, other: SampleLog) {
        self.runs.extend(other.runs);
    }

    /// Total number of executed inputs.
    pub fn steps(&self) -> usize {
        self.runs.iter().map(|r| r.word.len()).sum()
    }

    /// Replays every run on `m` from its initial state and files each delay
    /// under the transition taken. Fails if `m` predicts a different output.
    pub fn attribute(&self, m: &MealyMachine) -> Result<TransitionSamples> {
        let mut out = TransitionSamples::new(m.num_transitions());
        for run in &self.runs {
            out.add_run(m, run)?;
        }
        Ok(out)
    }
}

impl TransitionSamples {
    pub fn new(transitions: usize) -> Self {
        Self {
            samples: vec![Vec::new(); transitions],
        }
    }

    pub(crate) fn add_run(&mut self, m: &MealyMachine, run: &Run) -> Result<()> {
        let mut s = m.initial();
        for (pos, ((&i, o), &d)) in run.word.iter().zip(&run.outputs).zip(&run.delays).enumerate() {
            if m.output_name(s, i) != o {
                return Err(Error::StructuralViolation {
                    word: m.word_names(&run.word),
                    position: pos,
                    expected: m.output_name(s, i).to_string(),
                    actual: o.clone(),
                });
            }
            self.samples[m.transition_index(s, i)].push(d);
            s = m.next(s, i);
        }
        Ok(())
    }

    pub fn push(&mut self, t: usize, x: f64) {
        self.samples[t].push(x);
    }

    pub fn get(&self, t: usize) -> &[f64] {
        &self.samples[t]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.samples.iter().map(Vec::len).collect()
    }

    pub fn absorb(&mut self, other: TransitionSamples) {
        assert_eq!(self.samples.len(), other.samples.len());
        for (a, b) in self.samples.iter_mut().zip(other.samples) {
            a.extend(b);
        }
    }

    pub fn into_inner(self) -> Vec<Vec<f64>> {
        self.samples
    }
}
