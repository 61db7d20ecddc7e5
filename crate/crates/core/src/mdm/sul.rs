use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::MealyDelayMachine;
use crate::automata::{InputId, StateId};
use crate::error::{Error, Result};
use crate::learner::{Run, SampleLog};

/// A black box that can be reset and stepped. Resets are not inputs.
pub trait SystemUnderLearning {
    fn inputs(&self) -> Vec<String>;
    fn reset(&mut self) -> Result<()>;
    /// Executes one input and returns the output together with the observed delay.
    fn step(&mut self, input: InputId) -> Result<(String, f64)>;
}

/// Ground-truth simulator driven by a seeded RNG.
#[derive(Clone, Debug)]
pub struct Simulator {
    mdm: Arc<MealyDelayMachine>,
    current: StateId,
    rng: ChaCha8Rng,
}

impl Simulator {
    pub fn new(mdm: impl Into<Arc<MealyDelayMachine>>, seed: u64) -> Self {
        let mdm = mdm.into();
        let current = mdm.machine().initial();
        Self {
            mdm,
            current,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn current(&self) -> StateId {
        self.current
    }

    pub fn mdm(&self) -> &MealyDelayMachine {
        &self.mdm
    }
}

impl SystemUnderLearning for Simulator {
    fn inputs(&self) -> Vec<String> {
        self.mdm.machine().inputs().to_vec()
    }

    fn reset(&mut self) -> Result<()> {
        self.current = self.mdm.machine().initial();
        Ok(())
    }

    fn step(&mut self, input: InputId) -> Result<(String, f64)> {
        let m = self.mdm.machine();
        if input >= m.num_inputs() {
            return Err(Error::UnknownInput(format!("#{input}")));
        }
        let out = m.output_name(self.current, input).to_string();
        let delay = self.mdm.delay(self.current, input).sample(&mut self.rng);
        self.current = m.next(self.current, input);
        Ok((out, delay))
    }
}

/// Learner-facing handle on a SUL: counts steps and resets, enforces an
/// optional action budget and can record every run.
pub struct SulSession {
    sul: Box<dyn SystemUnderLearning + Send>,
    inputs: Vec<String>,
    steps: u64,
    resets: u64,
    max_actions: Option<u64>,
    recording: bool,
    log: SampleLog,
    current: Run,
}

impl SulSession {
    pub fn new(sul: impl SystemUnderLearning + Send + 'static) -> Self {
        Self::from_box(Box::new(sul))
    }

    pub fn from_box(sul: Box<dyn SystemUnderLearning + Send>) -> Self {
        let inputs = sul.inputs();
        Self {
            sul,
            inputs,
            steps: 0,
            resets: 0,
            max_actions: None,
            recording: false,
            log: SampleLog::default(),
            current: Run::default(),
        }
    }

    pub fn simulate(mdm: impl Into<Arc<MealyDelayMachine>>, seed: u64) -> Self {
        Self::new(Simulator::new(mdm, seed))
    }

    pub fn with_max_actions(mut self, max: u64) -> Self {
        self.max_actions = Some(max);
        self
    }

    pub fn set_max_actions(&mut self, max: Option<u64>) {
        self.max_actions = max;
    }

    pub fn max_actions(&self) -> Option<u64> {
        self.max_actions
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn resets(&self) -> u64 {
        self.resets
    }

    /// Steps plus resets.
    pub fn actions(&self) -> u64 {
        self.steps + self.resets
    }

    fn charge(&self) -> Result<()> {
        match self.max_actions {
            Some(budget) if self.actions() >= budget => Err(Error::BudgetExceeded { budget }),
            _ => Ok(()),
        }
    }

    pub fn reset(&mut self) -> Result<()> {
        self.charge()?;
        self.sul.reset()?;
        self.resets += 1;
        if self.recording {
            let run = std::mem::take(&mut self.current);
            if !run.word.is_empty() {
                self.log.push(run);
            }
        }
        Ok(())
    }

    pub fn step(&mut self, input: InputId) -> Result<(String, f64)> {
        if input >= self.inputs.len() {
            return Err(Error::UnknownInput(format!("#{input}")));
        }
        self.charge()?;
        let (out, delay) = self.sul.step(input)?;
        self.steps += 1;
        if self.recording {
            self.current.word.push(input);
            self.current.outputs.push(out.clone());
            self.current.delays.push(delay);
        }
        Ok((out, delay))
    }

    /// Reset followed by the whole word.
    pub fn query(&mut self, word: &[InputId]) -> Result<(Vec<String>, Vec<f64>)> {
        self.reset()?;
        let mut outs = Vec::with_capacity(word.len());
        let mut delays = Vec::with_capacity(word.len());
        for &i in word {
            let (o, d) = self.step(i)?;
            outs.push(o);
            delays.push(d);
        }
        Ok((outs, delays))
    }

    /// Starts recording runs into the session log. A run begins at each reset.
    pub fn start_recording(&mut self) {
        self.recording = true;
    }

    pub fn stop_recording(&mut self) {
        self.flush();
        self.recording = false;
    }

    fn flush(&mut self) {
        let run = std::mem::take(&mut self.current);
        if !run.word.is_empty() {
            self.log.push(run);
        }
    }

    /// Returns everything recorded so far and clears the log.
    pub fn take_log(&mut self) -> SampleLog {
        self.flush();
        std::mem::take(&mut self.log)
    }
}
