//! End-to-end runs of both learning methods, benchmarks and the external SUL
//! adapter.

mod bench;
mod external;

use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::automata::{minimize, MealyMachine};
use crate::coverage::{execute_plan, plan_coverage, residual_counts, Costs};
use crate::error::{Error, Result};
use crate::expansion::{expand, ExpansionOptions};
use crate::learner::{lstar_learn, sampling_lstar_learn, SamplingOptions};
use crate::mdm::{MealyDelayMachine, SulSession};
use crate::merging::{merge_states, SampledMdm};
use crate::oracles::{build_oracle, OracleConfig};
use crate::stats::{mean, EqualityTest};

pub use bench::{load_machine_dir, load_mdm, run_benchmark_suite, write_csv, BenchGrid, BenchRow};
pub use external::{serve, ExternalSul};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "sampling-lstar")]
    SamplingLstar,
    #[serde(rename = "expansion")]
    Expansion,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SamplingLstar => "sampling-lstar",
            Method::Expansion => "expansion",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampling-lstar" | "sampling" => Ok(Method::SamplingLstar),
            "expansion" => Ok(Method::Expansion),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    /// Required delay samples per transition.
    pub k: u64,
    pub d: usize,
    pub unique_root: bool,
    pub sink_ignorant: bool,
    /// Copies of a minimal self-loop share one requirement of `k` samples.
    pub relax_self_loops: bool,
    pub oracle: OracleConfig,
    pub test: EqualityTest,
    /// Budget on inputs plus resets.
    pub max_actions: u64,
    pub seed: u64,
    pub costs: Costs,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            method: Method::Expansion,
            k: 1000,
            d: 2,
            unique_root: false,
            sink_ignorant: false,
            relax_self_loops: true,
            oracle: OracleConfig::Perfect,
            test: EqualityTest::default(),
            max_actions: 100_000_000,
            seed: 0,
            costs: Costs::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.max_actions == 0 {
            return Err(Error::InvalidArgument("max_actions must be at least 1".into()));
        }
        Ok(())
    }

    fn expansion_options(&self) -> ExpansionOptions {
        ExpansionOptions {
            unique_root: self.unique_root,
            sink_ignorant: self.sink_ignorant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayEstimate {
    pub state: String,
    pub input: String,
    pub output: String,
    pub target: String,
    pub samples: usize,
    /// Exponential rate fitted as 1 / mean.
    pub rate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub method: Method,
    pub d: usize,
    pub unique_root: bool,
    pub size_min: Option<usize>,
    pub size_expanded: Option<usize>,
    pub size_final: Option<usize>,
    pub inputs: u64,
    pub resets: u64,
    pub aborted: bool,
    pub seconds: f64,
    pub equivalence_queries: usize,
    pub estimates: Vec<DelayEstimate>,
    #[serde(skip)]
    pub learned: Option<MealyDelayMachine>,
}

impl Report {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            method: cfg.method,
            d: cfg.d,
            unique_root: cfg.unique_root,
            size_min: None,
            size_expanded: None,
            size_final: None,
            inputs: 0,
            resets: 0,
            aborted: false,
            seconds: 0.0,
            equivalence_queries: 0,
            estimates: Vec::new(),
            learned: None,
        }
    }

    pub fn actions(&self) -> u64 {
        self.inputs + self.resets
    }

    /// Fitted rate per transition of the learned machine, in transition order.
    pub fn rates(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.rate).collect()
    }

    fn finish(&mut self, learned: MealyDelayMachine) {
        let m = learned.machine();
        self.size_final = Some(m.num_states());
        self.estimates = m
            .transitions()
            .map(|(s, i, o, t)| {
                let samples = match learned.delay(s, i) {
                    crate::mdm::DelayModel::Empirical { samples } => samples.as_slice(),
                    _ => &[],
                };
                DelayEstimate {
                    state: m.state_name(s).to_string(),
                    input: m.inputs()[i].clone(),
                    output: m.outputs()[o].clone(),
                    target: m.state_name(t).to_string(),
                    samples: samples.len(),
                    rate: if samples.is_empty() { 1.0 / learned.delay(s, i).mean() } else { 1.0 / mean(samples) },
                }
            })
            .collect();
        self.learned = Some(learned);
    }
}

/// Runs `body` and turns a budget overrun into an aborted report. Counters
/// always come from the session.
fn with_accounting(
    cfg: &ExperimentConfig,
    session: &mut SulSession,
    body: impl FnOnce(&mut SulSession, &mut Report) -> Result<()>,
) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg);
    let previous = session.max_actions();
    session.set_max_actions(Some(cfg.max_actions));
    let start = Instant::now();
    let result = body(session, &mut report);
    session.stop_recording();
    session.set_max_actions(previous);
    report.seconds = start.elapsed().as_secs_f64();
    report.inputs = session.steps();
    report.resets = session.resets();
    match result {
        Ok(()) => Ok(report),
        Err(Error::BudgetExceeded { .. }) => {
            report.aborted = true;
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

/// Learns the IO structure with L*, expands it, covers every transition of
/// the expansion `k` times and merges delay-equivalent states.
pub fn run_expansion_method(
    cfg: &ExperimentConfig,
    session: &mut SulSession,
    truth: Option<&MealyMachine>,
) -> Result<Report> {
    let mut oracle = build_oracle(cfg.oracle, truth)?;
    with_accounting(cfg, session, |session, report| {
        let learned = lstar_learn(session, oracle.as_mut())?;
        report.equivalence_queries = learned.equivalence_queries;
        let minimal = minimize(&learned.hypothesis);
        report.size_min = Some(minimal.num_states());
        let mx = expand(&minimal, cfg.d, cfg.expansion_options())?;
        report.size_expanded = Some(mx.num_states());
        let mut samples = learned.log.attribute(mx.machine())?;
        let need = residual_counts(&samples, &mx, cfg.k, cfg.relax_self_loops);
        let plan = plan_coverage(mx.machine(), &need, cfg.costs)?;
        let log = execute_plan(session, &plan, mx.machine())?;
        samples.absorb(log.attribute(mx.machine())?);
        let dx = SampledMdm::from_expansion(&mx, samples, cfg.relax_self_loops);
        let merged = merge_states(&dx, cfg.test)?;
        report.finish(merged.mdm);
        Ok(())
    })
}

/// Single-phase baseline: L* with every query repeated `k` times.
pub fn run_sampling_lstar_method(
    cfg: &ExperimentConfig,
    session: &mut SulSession,
    truth: Option<&MealyMachine>,
) -> Result<Report> {
    let mut oracle = build_oracle(cfg.oracle, truth)?;
    with_accounting(cfg, session, |session, report| {
        let opts = SamplingOptions {
            k: cfg.k,
            d: cfg.d,
            test: cfg.test,
        };
        let out = sampling_lstar_learn(session, oracle.as_mut(), &opts)?;
        report.equivalence_queries = out.equivalence_queries;
        report.size_min = Some(minimize(out.hypothesis()).num_states());
        report.finish(out.mdm);
        Ok(())
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, session: &mut SulSession, truth: Option<&MealyMachine>) -> Result<Report> {
    match cfg.method {
        Method::Expansion => run_expansion_method(cfg, session, truth),
        Method::SamplingLstar => run_sampling_lstar_method(cfg, session, truth),
    }
}

/// Runs `cfg` against a simulated ground truth seeded with `cfg.seed`.
pub fn simulate(cfg: &ExperimentConfig, truth: &MealyDelayMachine) -> Result<Report> {
    let mut session = SulSession::simulate(truth.clone(), cfg.seed);
    run_experiment(cfg, &mut session, Some(truth.machine()))
}
