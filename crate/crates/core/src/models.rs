//! Small reference machines bundled with the crate (also shipped as DOT files
//! under `machines/`).

use crate::automata::{parse_dot, MealyMachine};

pub const M_PRIME_DOT: &str = include_str!("../machines/m_prime.dot");
pub const TEST_M1_DOT: &str = include_str!("../machines/test_M1.dot");
pub const PARITY_SPLIT_DOT: &str = include_str!("../machines/parity_split.dot");
pub const ALTERNATING_SPLIT_DOT: &str = include_str!("../machines/alternating_split.dot");

/// Three-state cycle with outputs A/B, B/C, C/A on inputs a/b.
pub fn m_prime() -> MealyMachine {
    parse_dot(M_PRIME_DOT).expect("bundled machine")
}

/// Five-state expansion of [`m_prime`] that remembers which input left
/// the middle state. 2-step confluent, not 1-step confluent.
pub fn test_m1() -> MealyMachine {
    parse_dot(TEST_M1_DOT).expect("bundled machine")
}

/// Six-state expansion tracking the parity of rounds that start with `b`;
/// never confluent.
pub fn parity_split() -> MealyMachine {
    parse_dot(PARITY_SPLIT_DOT).expect("bundled machine")
}

/// Six-state expansion that alternates between two copies each round.
pub fn alternating_split() -> MealyMachine {
    parse_dot(ALTERNATING_SPLIT_DOT).expect("bundled machine")
}

/// All bundled machines as `(name, machine)`.
pub fn bundled() -> Vec<(&'static str, MealyMachine)> {
    vec![
        ("m_prime", m_prime()),
        ("test_M1", test_m1()),
        ("parity_split", parity_split()),
        ("alternating_split", alternating_split()),
    ]
}
