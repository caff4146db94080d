//! Test-only reference implementations.

use std::collections::{BTreeMap, VecDeque};

use regraph::automaton::TypedAutomaton;

/// State count of the minimal automaton equivalent to the deterministic
/// automaton `a`, by Moore's iterated refinement. Written independently of
/// the library's minimizer. States are first restricted to those reachable
/// from the start that can reach a final state, then split by finality and
/// rank and refined by the blocks their transitions lead to until stable.
pub fn moore_state_count(a: &TypedAutomaton) -> usize {
    let n = a.state_count();
    let mut fwd = vec![Vec::new(); n];
    let mut back = vec![Vec::new(); n];
    for t in a.transitions() {
        fwd[t.source as usize].push(t.target as usize);
        back[t.target as usize].push(t.source as usize);
    }
    let search = |starts: Vec<usize>, adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = starts.into_iter().collect();
        for &s in &queue {
            seen[s] = true;
        }
        while let Some(q) = queue.pop_front() {
            for &r in &adj[q] {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        seen
    };
    let reach = search(vec![a.start() as usize], &fwd);
    let finals: Vec<usize> = (0..n).filter(|&q| a.state(q as u32).is_final).collect();
    let coreach = search(finals, &back);
    let live: Vec<usize> = (0..n).filter(|&q| reach[q] && coreach[q]).collect();
    if live.is_empty() {
        // The empty language: just the start state.
        return 1;
    }

    let mut block: Vec<usize> = vec![usize::MAX; n];
    let mut ids: BTreeMap<(bool, usize), usize> = BTreeMap::new();
    for &q in &live {
        let s = a.state(q as u32);
        let next = ids.len();
        block[q] = *ids.entry((s.is_final, s.rank)).or_insert(next);
    }
    let mut count = ids.len();
    loop {
        let mut sigs: BTreeMap<(usize, Vec<(String, usize)>), usize> = BTreeMap::new();
        let mut next_block = block.clone();
        for &q in &live {
            let mut out: Vec<(String, usize)> = a
                .transitions()
                .iter()
                .filter(|t| t.source as usize == q && block[t.target as usize] != usize::MAX)
                .map(|t| (t.symbol.to_string(), block[t.target as usize]))
                .collect();
            out.sort();
            let fresh = sigs.len();
            next_block[q] = *sigs.entry((block[q], out)).or_insert(fresh);
        }
        let new_count = sigs.len();
        block = next_block;
        if new_count == count {
            return count;
        }
        count = new_count;
    }
}
