//! Parse a DOT machine, minimize it and print the canonical result.

use delaylearn::automata::{io_equivalent, minimize, parse_dot, serialize_dot};
use delaylearn::models;

fn main() -> delaylearn::Result<()> {
    let m = parse_dot(models::TEST_M1_DOT)?;
    let min = minimize(&m);
    println!("{} states, {} after minimization", m.num_states(), min.num_states());
    assert!(io_equivalent(&m, &min)?.is_none());

    let (outs, _) = m.run_symbols(&["a", "b", "a"])?;
    println!("a b a -> {}", outs.join(" "));

    let text = serialize_dot(&min);
    print!("{text}");
    assert_eq!(parse_dot(&text)?, min);
    Ok(())
}
