//! Mealy machines with a delay distribution on every transition.

mod generate;
mod json;
mod sul;

pub use generate::{expand_ground_truth, make_random_mdm, GroundTruthOptions, DEFAULT_RATE_RANGE};
pub use json::{mdm_from_json, mdm_to_json, MdmFile};
pub use sul::{Simulator, SulSession, SystemUnderLearning};

use rand::Rng;

use crate::automata::{io_partition, InputId, MealyMachine, StateId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum DelayModel {
    Exponential { rate: f64 },
    Point { value: f64 },
    /// Sorted, non-empty, non-negative samples.
    Empirical { samples: Vec<f64> },
}

impl DelayModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidDelay(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(DelayModel::Exponential { rate })
    }

    pub fn point(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidDelay(format!("point delay must be non-negative, got {value}")));
        }
        Ok(DelayModel::Point { value })
    }

    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDelay("empirical model needs at least one sample".into()));
        }
        if let Some(bad) = samples.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidDelay(format!("empirical sample {bad} is not a non-negative number")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(DelayModel::Empirical { samples })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            DelayModel::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DelayModel::Point { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
            DelayModel::Empirical { samples } => {
                samples.partition_point(|&s| s <= x) as f64 / samples.len() as f64
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DelayModel::Exponential { rate } => 1.0 / rate,
            DelayModel::Point { value } => *value,
            DelayModel::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }

    /// Draws one delay: inverse CDF for exponential and point models,
    /// resampling with replacement for empirical ones.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DelayModel::Exponential { rate } => {
                let u: f64 = rng.gen();
                -(-u).ln_1p() / rate
            }
            DelayModel::Point { value } => *value,
            DelayModel::Empirical { samples } => samples[rng.gen_range(0..samples.len())],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MealyDelayMachine {
    machine: MealyMachine,
    delays: Vec<DelayModel>,
}

impl MealyDelayMachine {
    /// `delays` is indexed like the machine's transitions (`state * |I| + input`).
    pub fn new(machine: MealyMachine, delays: Vec<DelayModel>) -> Result<Self> {
        if delays.len() != machine.num_transitions() {
            return Err(Error::LengthMismatch(format!(
                "{} delay models for {} transitions",
                delays.len(),
                machine.num_transitions()
            )));
        }
        Ok(Self { machine, delays })
    }

    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }

    pub fn delay(&self, s: StateId, i: InputId) -> &DelayModel {
        &self.delays[self.machine.transition_index(s, i)]
    }

    pub fn delays(&self) -> &[DelayModel] {
        &self.delays
    }

    /// Probability of the cylinder set: outputs `outs` and, at each position
    /// j, a delay in `intervals[j]`. Intervals are `(lo, hi]`; any interval
    /// with `lo <= 0` also contains 0. `hi` may be infinite.
    pub fn cylinder_probability<S: AsRef<str>>(
        &self,
        w: &[InputId],
        intervals: &[(f64, f64)],
        outs: &[S],
    ) -> Result<f64> {
        if w.len() != intervals.len() || w.len() != outs.len() {
            return Err(Error::LengthMismatch(format!(
                "word has length {}, intervals {}, outputs {}",
                w.len(),
                intervals.len(),
                outs.len()
            )));
        }
        if let Some(&(lo, hi)) = intervals.iter().find(|(lo, hi)| lo.is_nan() || hi.is_nan() || hi < lo) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        let m = &self.machine;
        let mut s = m.initial();
        let mut p = 1.0;
        for ((&i, &(lo, hi)), o) in w.iter().zip(intervals).zip(outs) {
            if i >= m.num_inputs() {
                return Err(Error::UnknownInput(format!("#{i}")));
            }
            if m.output_name(s, i) != o.as_ref() {
                return Ok(0.0);
            }
            let f = self.delay(s, i);
            let lower = if lo <= 0.0 { 0.0 } else { f.cdf(lo) };
            p *= f.cdf(hi) - lower;
            s = m.next(s, i);
        }
        Ok(p)
    }

    pub fn is_stutter_free(&self) -> bool {
        is_stutter_free(&self.machine)
    }

    pub fn is_d_step_confluent(&self, d: usize) -> bool {
        is_d_step_confluent(&self.machine, d)
    }
}

/// Every transition into an IO-equivalent state is a true self-loop.
pub fn is_stutter_free(m: &MealyMachine) -> bool {
    let class = io_partition(m);
    m.transitions()
        .all(|(s, _, _, t)| class[s] != class[t] || s == t)
}

/// All IO-equivalent state pairs reach the same state after every word of
/// length `d` that never stays inside an IO class.
pub fn is_d_step_confluent(m: &MealyMachine, d: usize) -> bool {
    let class = io_partition(m);
    let n = m.num_states();
    let mut frontier: Vec<(StateId, StateId)> = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if class[p] == class[q] {
                frontier.push((p, q));
            }
        }
    }
    for _ in 0..d {
        let mut next = std::collections::BTreeSet::new();
        for &(p, q) in &frontier {
            for i in 0..m.num_inputs() {
                let (tp, tq) = (m.next(p, i), m.next(q, i));
                if class[tp] == class[p] || tp == tq {
                    continue;
                }
                next.insert((tp.min(tq), tp.max(tq)));
            }
        }
        frontier = next.into_iter().collect();
        if frontier.is_empty() {
            return true;
        }
    }
    frontier.is_empty()
}
