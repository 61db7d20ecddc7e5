//! The single-phase baseline: L* whose rows also compare delay samples of
//! every query repeated k times.

use delaylearn::learner::{sampling_lstar_learn, SamplingOptions};
use delaylearn::mdm::{DelayModel, MealyDelayMachine, SulSession};
use delaylearn::models;
use delaylearn::oracles::PerfectOracle;
use delaylearn::stats::EqualityTest;

fn main() -> delaylearn::Result<()> {
    let m = models::test_m1();
    let rates = [0.8, 6.4, 0.1, 25.6, 1.6, 0.2, 12.8, 3.2, 51.2, 0.4];
    let delays = rates.iter().map(|&r| DelayModel::exponential(r)).collect::<Result<_, _>>()?;
    let truth = MealyDelayMachine::new(m.clone(), delays)?;

    for d in 0..=2 {
        let mut session = SulSession::simulate(truth.clone(), 3);
        let mut oracle = PerfectOracle::new(m.clone());
        let opts = SamplingOptions {
            k: 500,
            d,
            test: EqualityTest::default(),
        };
        let out = sampling_lstar_learn(&mut session, &mut oracle, &opts)?;
        println!(
            "d={d}: {} states, {} actions",
            out.hypothesis().num_states(),
            session.actions()
        );
    }
    Ok(())
}
