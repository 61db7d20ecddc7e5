//! Both learning methods end to end on a random confluent ground truth.

use delaylearn::automata::minimize;
use delaylearn::mdm::{expand_ground_truth, GroundTruthOptions};
use delaylearn::models;
use delaylearn::pipeline::{simulate, ExperimentConfig, Method};

fn main() -> delaylearn::Result<()> {
    let truth = expand_ground_truth(&models::m_prime(), 2, 9, GroundTruthOptions::default())?;
    println!(
        "truth: {} states, minimal {}",
        truth.machine().num_states(),
        minimize(truth.machine()).num_states()
    );
    for method in [Method::SamplingLstar, Method::Expansion] {
        let cfg = ExperimentConfig {
            method,
            k: 1000,
            d: 2,
            seed: 1,
            ..ExperimentConfig::default()
        };
        let r = simulate(&cfg, &truth)?;
        println!(
            "{:>15}: {:?} states, {} inputs, {} resets, {:.2}s",
            method.name(),
            r.size_final,
            r.inputs,
            r.resets,
            r.seconds
        );
    }
    Ok(())
}
