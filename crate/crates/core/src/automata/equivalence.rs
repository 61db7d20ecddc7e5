use std::collections::{HashMap, VecDeque};

use super::{MealyMachine, StateId, Word};
use crate::error::{Error, Result};

/// A word on which two systems disagree. `expected` is the reference answer
/// (SUL or left machine), `actual` the hypothesis answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub word: Word,
    pub expected: Vec<String>,
    pub actual: Vec<String>,
}

impl Counterexample {
    pub fn new(word: Word, expected: Vec<String>, actual: Vec<String>) -> Result<Self> {
        if word.len() != expected.len() || word.len() != actual.len() {
            return Err(Error::LengthMismatch(format!(
                "counterexample word has length {} but outputs have {} and {}",
                word.len(),
                expected.len(),
                actual.len()
            )));
        }
        if expected == actual {
            return Err(Error::NotACounterexample(expected));
        }
        Ok(Self {
            word,
            expected,
            actual,
        })
    }
}

pub(crate) fn check_alphabets(a: &MealyMachine, b: &MealyMachine) -> Result<()> {
    if a.inputs() != b.inputs() {
        return Err(Error::AlphabetMismatch {
            left: a.inputs().to_vec(),
            right: b.inputs().to_vec(),
        });
    }
    Ok(())
}

/// Explores the synchronous product from the initial pair in BFS order.
/// Returns the visited pairs with their shortlex-least access words, or the
/// first output mismatch found.
fn product_bfs(
    a: &MealyMachine,
    b: &MealyMachine,
) -> std::result::Result<Vec<(StateId, StateId)>, Counterexample> {
    let k = a.num_inputs();
    let mut parent: HashMap<(StateId, StateId), Option<(usize, usize)>> = HashMap::new();
    let mut order: Vec<(StateId, StateId)> = Vec::new();
    let start = (a.initial(), b.initial());
    parent.insert(start, None);
    order.push(start);
    let mut queue = VecDeque::from([0usize]);
    let word_of = |order: &Vec<(StateId, StateId)>,
                   parent: &HashMap<(StateId, StateId), Option<(usize, usize)>>,
                   mut idx: usize| {
        let mut w = Vec::new();
        while let Some((p, i)) = parent[&order[idx]] {
            w.push(i);
            idx = p;
        }
        w.reverse();
        w
    };
    while let Some(idx) = queue.pop_front() {
        let (sa, sb) = order[idx];
        for i in 0..k {
            if a.output_name(sa, i) != b.output_name(sb, i) {
                let mut w = word_of(&order, &parent, idx);
                w.push(i);
                let ea = a.run(&w).expect("valid word").0;
                let eb = b.run(&w).expect("valid word").0;
                return Err(Counterexample {
                    expected: ea.iter().map(|&o| a.outputs()[o].clone()).collect(),
                    actual: eb.iter().map(|&o| b.outputs()[o].clone()).collect(),
                    word: w,
                });
            }
        }
        for i in 0..k {
            let t = (a.next(sa, i), b.next(sb, i));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(t) {
                e.insert(Some((idx, i)));
                order.push(t);
                queue.push_back(order.len() - 1);
            }
        }
    }
    Ok(order)
}

/// `None` iff the machines are IO-equivalent; otherwise the shortest,
/// shortlex-least distinguishing word (outputs of `a` as expected).
pub fn io_equivalent(a: &MealyMachine, b: &MealyMachine) -> Result<Option<Counterexample>> {
    check_alphabets(a, b)?;
    Ok(product_bfs(a, b).err())
}

/// Synchronous traversal of both machines; succeeds iff outputs agree and no
/// state of `big` is paired with two different states of `small`.
pub fn find_injective_bisimulation(
    small: &MealyMachine,
    big: &MealyMachine,
) -> Result<Option<Vec<(StateId, StateId)>>> {
    check_alphabets(small, big)?;
    let pairs = match product_bfs(small, big) {
        Ok(p) => p,
        Err(_) => return Ok(None),
    };
    let mut partner = vec![usize::MAX; big.num_states()];
    for &(s, b) in &pairs {
        if partner[b] != usize::MAX && partner[b] != s {
            return Ok(None);
        }
        partner[b] = s;
    }
    let mut pairs = pairs;
    pairs.sort_unstable();
    Ok(Some(pairs))
}

/// Structural isomorphism (same inputs, same output names, same shape).
pub fn is_isomorphic(a: &MealyMachine, b: &MealyMachine) -> bool {
    if a.inputs() != b.inputs() || a.num_states() != b.num_states() {
        return false;
    }
    let ca = a.canonical();
    let cb = b.canonical();
    let same = ca
        .transitions()
        .zip(cb.transitions())
        .all(|((_, _, oa, ta), (_, _, ob, tb))| ta == tb && ca.outputs()[oa] == cb.outputs()[ob]);
    same
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::machine_from_rows;
    use crate::models;

    #[test]
    fn m_prime_and_test_m1_equivalent() {
        let a = models::m_prime();
        let b = models::test_m1();
        assert!(io_equivalent(&a, &b).unwrap().is_none());
        assert!(io_equivalent(&a, &a).unwrap().is_none());
    }

    #[test]
    fn first_letter_mismatch() {
        let a = models::m_prime();
        let b = machine_from_rows(
            &["a", "b"],
            &[
                ("s0", "a", "B", "s1"),
                ("s0", "b", "B", "s1"),
                ("s1", "a", "B", "s2"),
                ("s1", "b", "C", "s2"),
                ("s2", "a", "C", "s0"),
                ("s2", "b", "A", "s0"),
            ],
        )
        .unwrap();
        let cex = io_equivalent(&a, &b).unwrap().unwrap();
        assert_eq!(cex.word, vec![0]);
        assert_eq!(cex.expected, vec!["A"]);
        assert_eq!(cex.actual, vec!["B"]);
    }

    #[test]
    fn shortest_cex_is_shortlex_least() {
        // Differ only after "b" then "b".
        let rows_a = [
            ("p", "a", "x", "p"),
            ("p", "b", "x", "q"),
            ("q", "a", "x", "p"),
            ("q", "b", "y", "p"),
        ];
        let rows_b = [
            ("p", "a", "x", "p"),
            ("p", "b", "x", "q"),
            ("q", "a", "x", "p"),
            ("q", "b", "z", "p"),
        ];
        let a = machine_from_rows(&["a", "b"], &rows_a).unwrap();
        let b = machine_from_rows(&["a", "b"], &rows_b).unwrap();
        let cex = io_equivalent(&a, &b).unwrap().unwrap();
        assert_eq!(cex.word, vec![1, 1]);
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let a = models::m_prime();
        let b = machine_from_rows(&["a"], &[("s", "a", "A", "s")]).unwrap();
        assert!(matches!(io_equivalent(&a, &b), Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn identity_bisimulation() {
        let m = models::test_m1();
        let r = find_injective_bisimulation(&m, &m).unwrap().unwrap();
        assert_eq!(r, (0..m.num_states()).map(|s| (s, s)).collect::<Vec<_>>());
    }

    #[test]
    fn split_pair_not_injective() {
        let l = models::parity_split();
        let r = models::alternating_split();
        assert!(find_injective_bisimulation(&l, &r).unwrap().is_none());
        assert!(find_injective_bisimulation(&r, &l).unwrap().is_none());
    }

    #[test]
    fn counterexample_validation() {
        assert!(Counterexample::new(vec![0], vec!["A".into()], vec!["A".into()]).is_err());
        assert!(Counterexample::new(vec![0], vec!["A".into()], vec![]).is_err());
        assert!(Counterexample::new(vec![0], vec!["A".into()], vec!["B".into()]).is_ok());
    }
}
