use crate::automata::MealyMachine;
use crate::error::{Error, Result};
use crate::mdm::{DelayModel, MealyDelayMachine, SulSession};
use crate::oracles::EquivalenceOracle;
use crate::stats::EqualityTest;

use super::lstar::{learn_with_table, ObservationTable, TableConfig};
use super::SampleLog;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingOptions {
    pub k: u64,
    pub d: usize,
    pub test: EqualityTest,
}

#[derive(Clone, Debug)]
pub struct SamplingOutcome {
    /// Learned structure with the empirical delay samples of each transition.
    pub mdm: MealyDelayMachine,
    pub table: ObservationTable,
    pub log: SampleLog,
    pub equivalence_queries: usize,
    pub eq_steps: u64,
    pub eq_resets: u64,
}

impl SamplingOutcome {
    pub fn hypothesis(&self) -> &MealyMachine {
        self.mdm.machine()
    }
}

/// L* that runs every row word and every short test k times and separates
/// rows whose delays differ on some test of length at most `d`.
pub fn sampling_lstar_learn(
    session: &mut SulSession,
    oracle: &mut dyn EquivalenceOracle,
    opts: &SamplingOptions,
) -> Result<SamplingOutcome> {
    if opts.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let cfg = TableConfig {
        k: opts.k,
        d: opts.d,
        delay_test: Some(opts.test),
    };
    session.start_recording();
    let result = learn_with_table(session, oracle, cfg);
    let log = session.take_log();
    session.stop_recording();
    let out = result?;
    let h = &out.hypothesis;
    let mut delays = Vec::with_capacity(h.num_transitions());
    for q in 0..h.num_states() {
        for i in 0..h.num_inputs() {
            delays.push(DelayModel::empirical(out.table.transition_samples(q, i).to_vec())?);
        }
    }
    Ok(SamplingOutcome {
        mdm: MealyDelayMachine::new(out.hypothesis, delays)?,
        table: out.table,
        log,
        equivalence_queries: out.equivalence_queries,
        eq_steps: out.eq_steps,
        eq_resets: out.eq_resets,
    })
}
