//! Subset construction over graph symbols.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::PipelineError;
use crate::automaton::{StateId, TypedAutomaton};
use crate::model::GraphSymbol;

/// Determinizes `a`, exploring reachable subsets only. Every reachable subset
/// must be deterministic on `(label, front)`: two atoms that agree there must
/// be the same symbol.
pub fn powerset(a: &TypedAutomaton) -> Result<TypedAutomaton, PipelineError> {
    let out = a.outgoing();
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut subsets: Vec<Vec<StateId>> = Vec::new();
    let mut queue = VecDeque::new();
    let start = vec![a.start()];
    ids.insert(start.clone(), 0);
    subsets.push(start.clone());
    queue.push_back(start);
    let mut edges: Vec<(StateId, GraphSymbol, StateId)> = Vec::new();

    while let Some(set) = queue.pop_front() {
        let from = ids[&set];
        // First-appearance order of symbols keeps the output stable.
        let mut order: Vec<&GraphSymbol> = Vec::new();
        let mut targets: HashMap<&GraphSymbol, BTreeSet<StateId>> = HashMap::new();
        let mut keys: BTreeMap<(&str, &[usize]), &GraphSymbol> = BTreeMap::new();
        for &q in &set {
            for &t in &out[q as usize] {
                let tr = a.transition(t);
                if let GraphSymbol::Atom(atom) = &tr.symbol {
                    let prev = keys.entry((atom.label(), atom.front())).or_insert(&tr.symbol);
                    if *prev != &tr.symbol {
                        return Err(PipelineError::Ambiguous {
                            first: prev.to_string(),
                            second: tr.symbol.to_string(),
                        });
                    }
                }
                let entry = targets.entry(&tr.symbol).or_insert_with(|| {
                    order.push(&tr.symbol);
                    BTreeSet::new()
                });
                entry.insert(tr.target);
            }
        }
        for sym in order {
            let next: Vec<StateId> = targets[sym].iter().copied().collect();
            let rank = a.state(next[0]).rank;
            if let Some(&q) = next.iter().find(|&&q| a.state(q).rank != rank) {
                return Err(PipelineError::MixedRankSubset {
                    first: a.state(next[0]).name.clone(),
                    second: a.state(q).name.clone(),
                });
            }
            let to = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = subsets.len() as StateId;
                    ids.insert(next.clone(), id);
                    subsets.push(next.clone());
                    queue.push_back(next);
                    id
                }
            };
            edges.push((from, sym.clone(), to));
        }
    }

    let mut d = TypedAutomaton::new(a.vocab().clone());
    for (i, set) in subsets.iter().enumerate() {
        let is_final = set.iter().any(|&q| a.state(q).is_final);
        d.add_state(&format!("q{i}"), a.state(set[0]).rank, is_final)
            .expect("fresh names");
    }
    d.set_start(0);
    for (p, s, q) in edges {
        d.add_transition(p, s, q).expect("ranks checked per subset");
    }
    Ok(d)
}

/// No state has two outgoing transitions with the same symbol or two atom
/// transitions with the same `(label, front)`.
pub fn is_deterministic(a: &TypedAutomaton) -> bool {
    a.outgoing().iter().all(|ts| {
        let mut symbols = BTreeSet::new();
        let mut keys = BTreeSet::new();
        ts.iter().all(|&t| {
            let s = &a.transition(t).symbol;
            symbols.insert(s)
                && match s {
                    GraphSymbol::Atom(atom) => keys.insert((atom.label(), atom.front())),
                    GraphSymbol::Blank(_) => true,
                }
        })
    })
}

/// Every blank transition ends in a final state without outgoing transitions.
pub fn blanks_end_in_sinks(a: &TypedAutomaton) -> bool {
    let out = a.outgoing();
    a.transitions().iter().all(|t| {
        !t.symbol.is_blank() || (a.state(t.target).is_final && out[t.target as usize].is_empty())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_automaton_spec;

    #[test]
    fn shared_prefix_is_merged() {
        let a = parse_automaton_spec(
            "symbol a(2), c(2)\n\
             state p(2), x(2), y(2), *f(0)\n\
             start p\n\
             p -> x : a^13_23\n\
             p -> y : a^13_23\n\
             x -> f : c^12_<>\n\
             y -> f : c^21_<>\n",
        )
        .unwrap();
        let d = powerset(&a).unwrap();
        assert_eq!(d.state_count(), 3);
        assert_eq!(d.outgoing()[0].len(), 1);
        assert!(is_deterministic(&d));
    }

    #[test]
    fn rear_conflicts_are_reported() {
        let a = parse_automaton_spec(
            "symbol a(2)\n\
             state p(1), x(1), y(2)\n\
             start p\n\
             p -> x : a^1_2\n\
             p -> y : a^1_12\n",
        )
        .unwrap();
        assert!(matches!(powerset(&a), Err(PipelineError::Ambiguous { .. })));
    }
}
