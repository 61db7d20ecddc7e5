//! Attach exponential delays to a machine, run a word and show what a learner
//! observes. Same seed, same delays.

use delaylearn::mdm::{make_random_mdm, mdm_from_json, mdm_to_json, Simulator, SulSession};
use delaylearn::models;

fn main() -> delaylearn::Result<()> {
    let mdm = make_random_mdm(&models::test_m1(), 7, (0.5, 5.0));
    let json = mdm_to_json(&mdm, None);
    let back = mdm_from_json(&json, None)?;

    let w = back.machine().parse_word("abab")?;
    let mut session = SulSession::new(Simulator::new(back, 7));
    let (outs, delays) = session.query(&w)?;
    for ((i, o), d) in w.iter().zip(&outs).zip(&delays) {
        println!("{} / {o}  {d:.4}s", mdm.machine().inputs()[*i]);
    }
    println!("{} inputs, {} resets", session.steps(), session.resets());

    let ab = mdm.machine().parse_word("ab")?;
    let p = mdm.cylinder_probability(&ab, &[(0.0, 1.0), (0.0, 1.0)], &["A", "C"])?;
    println!("P(ab answers A C, both within 1s) = {p:.4}");
    Ok(())
}
