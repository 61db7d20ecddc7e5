//! Plan a walk that takes every transition a required number of times, with
//! resets costed separately, and run it against a simulator.

use delaylearn::coverage::{build_coverage_graph, execute_plan, plan_coverage, Costs};
use delaylearn::expansion::{expand, ExpansionOptions};
use delaylearn::mdm::{make_random_mdm, SulSession};
use delaylearn::models;

fn main() -> delaylearn::Result<()> {
    let mx = expand(&models::m_prime(), 1, ExpansionOptions::default())?;
    let m = mx.machine();
    let need = vec![3; m.num_transitions()];

    let g = build_coverage_graph(m, &need, Costs::default());
    println!(
        "{} mandatory traversals, balanced: {}, connected: {}",
        g.mandatory_total(),
        g.is_balanced(),
        g.mandatory_connected()
    );

    for reset in [1, 5, 50] {
        let costs = Costs { step: 1, reset };
        let plan = plan_coverage(m, &need, costs)?;
        println!("reset cost {reset:>2}: {} words, {} steps, cost {}", plan.words.len(), plan.steps(), plan.cost);
    }

    let plan = plan_coverage(m, &need, Costs::default())?;
    let truth = make_random_mdm(m, 4, (1.0, 10.0));
    let mut session = SulSession::simulate(truth, 4);
    let log = execute_plan(&mut session, &plan, m)?;
    let counts = log.attribute(m)?.counts();
    assert!(counts.iter().all(|&c| c >= 3));
    println!("samples per transition: {counts:?}");
    println!("{}", serde_json::to_string(&plan.named(m)).expect("serializable"));
    Ok(())
}
