//! Plain L* for the input/output structure, with three equivalence oracles.

use delaylearn::automata::{io_equivalent, minimize};
use delaylearn::learner::lstar_learn;
use delaylearn::mdm::{make_random_mdm, SulSession};
use delaylearn::models;
use delaylearn::oracles::build_oracle;

fn main() -> delaylearn::Result<()> {
    let truth = make_random_mdm(&models::parity_split(), 1, (1.0, 2.0));
    for cfg in ["perfect", "wmethod:2", "walk:20,200,5"] {
        let mut oracle = build_oracle(cfg.parse()?, Some(truth.machine()))?;
        let mut session = SulSession::simulate(truth.clone(), 0);
        let out = lstar_learn(&mut session, oracle.as_mut())?;
        let ok = io_equivalent(&out.hypothesis, truth.machine())?.is_none();
        println!(
            "{cfg:>14}: {} states, {} EQs, {} inputs, {} resets, correct: {ok}",
            out.hypothesis.num_states(),
            out.equivalence_queries,
            session.steps(),
            session.resets(),
        );
    }
    assert_eq!(minimize(truth.machine()).num_states(), 3);
    Ok(())
}
