//! Hopcroft partition refinement for deterministic typed automata.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{StateId, TypedAutomaton};
use crate::model::GraphSymbol;

/// Merges indistinguishable states. The initial partition separates states by
/// finality and rank, so merged states always share a rank.
///
/// States are renumbered breadth-first from the start state; each merged
/// state keeps the transition order of its lowest-numbered member.
pub fn minimize(a: &TypedAutomaton) -> TypedAutomaton {
    let a = a.trim();
    let n = a.state_count();
    let dead = n;

    let mut symbols: Vec<&GraphSymbol> = Vec::new();
    let mut symbol_ids: HashMap<&GraphSymbol, usize> = HashMap::new();
    for t in a.transitions() {
        symbol_ids.entry(&t.symbol).or_insert_with(|| {
            symbols.push(&t.symbol);
            symbols.len() - 1
        });
    }
    let k = symbols.len();

    // Complete transition function over n + 1 states (the last one is dead).
    let mut delta = vec![dead; (n + 1) * k];
    for t in a.transitions() {
        delta[t.source as usize * k + symbol_ids[&t.symbol]] = t.target as usize;
    }
    let mut inverse: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n + 1]; k];
    for p in 0..=n {
        for (c, inv) in inverse.iter_mut().enumerate() {
            inv[delta[p * k + c]].push(p);
        }
    }

    let mut block_of = vec![0usize; n + 1];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut initial: HashMap<Option<(bool, usize)>, usize> = HashMap::new();
    for q in 0..=n {
        let key = (q < n).then(|| (a.state(q as StateId).is_final, a.state(q as StateId).rank));
        let b = *initial.entry(key).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(q);
        block_of[q] = b;
    }

    let mut pending: VecDeque<(usize, usize)> = VecDeque::new();
    let mut queued: Vec<Vec<bool>> = vec![vec![false; k]; blocks.len()];
    for b in 0..blocks.len() {
        for c in 0..k {
            pending.push_back((b, c));
            queued[b][c] = true;
        }
    }

    let mut marked = vec![false; n + 1];
    while let Some((b, c)) = pending.pop_front() {
        queued[b][c] = false;
        let mut preimage = Vec::new();
        for &q in &blocks[b] {
            for &p in &inverse[c][q] {
                if !marked[p] {
                    marked[p] = true;
                    preimage.push(p);
                }
            }
        }
        let mut touched: Vec<usize> = preimage.iter().map(|&p| block_of[p]).collect();
        touched.sort_unstable();
        touched.dedup();
        for y in touched {
            let (inside, outside): (Vec<usize>, Vec<usize>) = blocks[y].iter().partition(|&&p| marked[p]);
            if outside.is_empty() {
                continue;
            }
            let z = blocks.len();
            for &p in &outside {
                block_of[p] = z;
            }
            let smaller_is_new = outside.len() <= inside.len();
            blocks[y] = inside;
            blocks.push(outside);
            queued.push(vec![false; k]);
            for d in 0..k {
                if queued[y][d] {
                    queued[z][d] = true;
                    pending.push_back((z, d));
                } else {
                    let pick = if smaller_is_new { z } else { y };
                    queued[pick][d] = true;
                    pending.push_back((pick, d));
                }
            }
        }
        for p in preimage {
            marked[p] = false;
        }
    }

    rebuild(&a, &blocks, &block_of, dead)
}

fn rebuild(a: &TypedAutomaton, blocks: &[Vec<usize>], block_of: &[usize], dead: usize) -> TypedAutomaton {
    let out = a.outgoing();
    let rep = |b: usize| *blocks[b].iter().min().expect("non-empty block");
    let mut new_id: Vec<Option<StateId>> = vec![None; blocks.len()];
    let mut order = vec![block_of[a.start() as usize]];
    new_id[order[0]] = Some(0);
    let mut i = 0;
    while i < order.len() {
        let q = rep(order[i]);
        i += 1;
        for &t in &out[q] {
            let b = block_of[a.transition(t).target as usize];
            if b != block_of[dead] && new_id[b].is_none() {
                new_id[b] = Some(order.len() as StateId);
                order.push(b);
            }
        }
    }
    let mut m = TypedAutomaton::new(a.vocab().clone());
    for (i, &b) in order.iter().enumerate() {
        let s = a.state(rep(b) as StateId);
        m.add_state(&format!("q{i}"), s.rank, s.is_final).expect("fresh names");
    }
    m.set_start(0);
    for &b in &order {
        let q = rep(b);
        for &t in &out[q] {
            let tr = a.transition(t);
            let target = new_id[block_of[tr.target as usize]].expect("reachable");
            m.add_transition(new_id[b].expect("numbered"), tr.symbol.clone(), target)
                .expect("ranks agree within blocks");
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_automaton_spec;

    #[test]
    fn duplicate_sinks_merge() {
        let a = parse_automaton_spec(
            "symbol c(2)\n\
             state p(2), *f(0), *g(0)\n\
             start p\n\
             p -> f : c^12_<>\n\
             p -> g : c^21_<>\n",
        )
        .unwrap();
        assert_eq!(minimize(&a).state_count(), 2);
    }

    #[test]
    fn sinks_of_different_rank_stay_apart() {
        let a = parse_automaton_spec(
            "symbol c(2)\n\
             state p(2), *f(0), *g(1)\n\
             start p\n\
             p -> f : c^12_<>\n\
             p -> g : c^12_1\n",
        )
        .unwrap();
        assert_eq!(minimize(&a).state_count(), 3);
    }

    #[test]
    fn empty_language_keeps_start() {
        let a = parse_automaton_spec("symbol c(2)\nstate p(2), q(2)\nstart p\np -> q : c^12_12\n").unwrap();
        let m = minimize(&a);
        assert_eq!(m.state_count(), 1);
        assert!(m.transitions().is_empty());
    }
}
