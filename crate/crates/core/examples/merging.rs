//! Collapse copies of states whose delays cannot be told apart. The truth
//! distinguishes the two middle states of the five-state machine by delay only.

use delaylearn::automata::minimize;
use delaylearn::coverage::{execute_plan, plan_coverage, Costs};
use delaylearn::expansion::{expand, ExpansionOptions};
use delaylearn::mdm::{DelayModel, MealyDelayMachine, SulSession};
use delaylearn::merging::{merge_states, SampledMdm};
use delaylearn::models;
use delaylearn::stats::EqualityTest;

fn main() -> delaylearn::Result<()> {
    let m = models::test_m1();
    let rates = [0.8, 6.4, 0.1, 25.6, 1.6, 0.2, 12.8, 3.2, 51.2, 0.4];
    let delays = rates.iter().map(|&r| DelayModel::exponential(r)).collect::<Result<_, _>>()?;
    let truth = MealyDelayMachine::new(m.clone(), delays)?;

    let mx = expand(&minimize(&m), 2, ExpansionOptions::default())?;
    let need = vec![1000; mx.machine().num_transitions()];
    let plan = plan_coverage(mx.machine(), &need, Costs::default())?;
    let mut session = SulSession::simulate(truth, 11);
    let samples = execute_plan(&mut session, &plan, mx.machine())?.attribute(mx.machine())?;

    for (name, test) in [
        ("20% means", EqualityTest::default()),
        ("always equal", EqualityTest::always_equal()),
        ("never equal", EqualityTest::never_equal()),
    ] {
        let dx = SampledMdm::from_expansion(&mx, samples.clone(), false);
        let out = merge_states(&dx, test)?;
        println!("{name:>12}: {} -> {} states", mx.num_states(), out.machine().num_states());
    }

    let out = merge_states(&SampledMdm::from_expansion(&mx, samples, false), EqualityTest::default())?;
    let mm = out.machine();
    for s in 0..mm.num_states() {
        for t in s + 1..mm.num_states() {
            if let Some(w) = out.witness(s, t) {
                println!("{} vs {}: told apart by {:?}", mm.state_name(s), mm.state_name(t), mm.word_names(&w));
            }
        }
    }
    for ((s, i, _, _), r) in mm.transitions().zip(&out.rates) {
        println!("{} --{}--> rate {r:.2}", mm.state_name(s), mm.inputs()[i]);
    }
    Ok(())
}
