//! History expansion of a minimal machine and how it grows with d.

use delaylearn::automata::serialize_dot;
use delaylearn::expansion::{expand, size_bound, ExpansionOptions};
use delaylearn::models;

fn main() -> delaylearn::Result<()> {
    let m = models::m_prime();
    println!(" d  plain  unique-root  bound");
    for d in 0..=5 {
        let plain = expand(&m, d, ExpansionOptions::default())?;
        let rooted = expand(&m, d, ExpansionOptions { unique_root: true, sink_ignorant: false })?;
        println!(
            "{d:>2} {:>6} {:>12} {:>6}",
            plain.num_states(),
            rooted.num_states(),
            size_bound(m.num_states(), m.num_inputs(), d)
        );
    }

    let mx = expand(&m, 1, ExpansionOptions::default())?;
    for x in 0..mx.num_states() {
        let tag = mx.tag(x);
        println!("{:<10} base {} origin {} history {:?}", mx.machine().state_name(x), tag.base, tag.origin, tag.word);
    }
    print!("{}", serialize_dot(mx.machine()));
    Ok(())
}
