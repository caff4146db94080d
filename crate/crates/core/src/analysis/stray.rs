//! Stray-edge reachability over marked front slots.
//!
//! A stray for transition `t1` at state `q` is an unread edge that matches
//! `t1` while the run takes another step. Each attachment position that `t1`
//! binds to the front carries a mark on that front slot. Marks follow their
//! node through later steps and die when the node leaves the front; a dead
//! mark means the stray can never be read, so the branch is dropped.

use std::collections::{HashSet, VecDeque};

use crate::automaton::{StateId, TypedAutomaton};
use crate::model::AtomSymbol;

/// Automaton state plus the front slot currently holding each mark.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkState {
    pub state: StateId,
    pub marks: Vec<usize>,
}

/// Moves marks through one atom step; `None` if some mark dies.
pub fn propagate_marks(marks: &[usize], atom: &AtomSymbol) -> Option<Vec<usize>> {
    marks
        .iter()
        .map(|&slot| {
            let node = atom.front()[slot];
            atom.rear().iter().position(|&r| r == node)
        })
        .collect()
}

/// Whether `consumer` can read the stray: same label, and every marked
/// attachment position is bound to the slot holding its mark.
fn consumes(consumer: &AtomSymbol, label: &str, positions: &[usize], marks: &[usize]) -> bool {
    consumer.label() == label
        && positions
            .iter()
            .zip(marks)
            .all(|(&pos, &slot)| consumer.front()[slot] == pos + 1)
}

/// Atom transitions leaving each state.
pub(crate) fn atom_successors(a: &TypedAutomaton) -> Vec<Vec<(usize, &AtomSymbol, StateId)>> {
    let mut out = vec![Vec::new(); a.state_count()];
    for (i, t) in a.transitions().iter().enumerate() {
        if let Some(atom) = t.symbol.as_atom() {
            out[t.source as usize].push((i, atom, t.target));
        }
    }
    out
}

/// Upper bound on the number of distinct mark states for `t1`.
pub fn mark_state_bound(a: &TypedAutomaton, t1: usize) -> usize {
    let marks = a.transition(t1).symbol.as_atom().map_or(0, |x| x.bound_positions().len());
    let slots = a.states().iter().map(|s| s.rank).max().unwrap_or(0).max(1);
    a.state_count().saturating_mul(slots.saturating_pow(marks as u32))
}

/// True iff an edge matching atom transition `t1` can be left unread while
/// the run takes atom transition `t2` from the same state, and still be read
/// later.
pub fn strayable(a: &TypedAutomaton, t1: usize, t2: usize) -> bool {
    strayable_with(a, &atom_successors(a), t1, t2)
}

pub(crate) fn strayable_with(
    a: &TypedAutomaton,
    succ: &[Vec<(usize, &AtomSymbol, StateId)>],
    t1: usize,
    t2: usize,
) -> bool {
    let (tr1, tr2) = (a.transition(t1), a.transition(t2));
    let (Some(stray), Some(taken)) = (tr1.symbol.as_atom(), tr2.symbol.as_atom()) else {
        return false;
    };
    debug_assert_eq!(tr1.source, tr2.source);
    let bound = stray.bound_positions();
    let positions: Vec<usize> = bound.iter().map(|&(p, _)| p).collect();
    let slots: Vec<usize> = bound.iter().map(|&(_, s)| s).collect();
    let Some(marks) = propagate_marks(&slots, taken) else {
        return false;
    };

    let start = MarkState {
        state: tr2.target,
        marks,
    };
    let mut seen: HashSet<MarkState> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(ms) = queue.pop_front() {
        let here = &succ[ms.state as usize];
        if here
            .iter()
            .any(|(_, atom, _)| consumes(atom, stray.label(), &positions, &ms.marks))
        {
            return true;
        }
        for &(_, atom, target) in here {
            if let Some(marks) = propagate_marks(&ms.marks, atom) {
                let next = MarkState { state: target, marks };
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    debug_assert!(seen.len() <= mark_state_bound(a, t1));
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_automaton_spec;

    fn find(a: &TypedAutomaton, sym: &str) -> usize {
        a.transitions().iter().position(|t| t.symbol.to_string() == sym).unwrap()
    }

    const ABC: &str = "symbol a(2), b(2), c(2)
state q0(2), q1(2), q2(3), q3(1), q4(3), *q5(0), q6(3)
start q0
q0 -> q1 : a^13_23
q1 -> q2 : b^32_312
q1 -> q3 : b^12_2
q2 -> q4 : c^341_342
q4 -> q6 : a^134_234
q6 -> q2 : b^324_314
q6 -> q3 : b^123_3
q3 -> q5 : c^1_<>
";

    #[test]
    fn abc_has_no_strays() {
        let a = parse_automaton_spec(ABC).unwrap();
        assert!(!strayable(&a, find(&a, "b^12_2"), find(&a, "b^32_312")));
        for (i, t) in a.transitions().iter().enumerate() {
            for (j, u) in a.transitions().iter().enumerate() {
                if t.source == u.source {
                    assert!(!strayable(&a, i, j), "{} / {}", t.symbol, u.symbol);
                }
            }
        }
    }

    #[test]
    fn spikes_loop_mark_dies() {
        let a = parse_automaton_spec(
            "symbol s(3)\nstate p(3), q(3), *f(0)\nstart p\np -> q : s^124_134\nq -> q : s^134_124\nq -> f : s^123_<>\n",
        )
        .unwrap();
        let l = find(&a, "s^134_124");
        assert!(!strayable(&a, l, l));
    }

    #[test]
    fn loose_spokes_loop_is_self_strayable() {
        let a = parse_automaton_spec(
            "symbol s(3)\nstate p(1), *q(1)\nstart p\np -> q : s^1_1\nq -> q : s^1_1\n",
        )
        .unwrap();
        let l = a
            .transitions()
            .iter()
            .position(|t| t.source == 1)
            .unwrap();
        assert!(strayable(&a, l, l));
    }

    #[test]
    fn propagation() {
        let v = crate::model::Vocabulary::from_pairs([("b", 2)]).unwrap();
        let b = crate::model::make_atom("b", &[3, 2], &[3, 1, 2], &v).unwrap();
        assert_eq!(propagate_marks(&[0, 1], &b), Some(vec![0, 2]));
        let c = crate::model::make_atom("b", &[1, 2], &[2], &v).unwrap();
        assert_eq!(propagate_marks(&[0], &c), None);
    }
}
