//! Typed finite automata over graph symbols.

use std::collections::{HashSet, VecDeque};

use crate::model::{GraphSymbol, Vocabulary};

pub type StateId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub rank: usize,
    pub is_final: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: StateId,
    pub symbol: GraphSymbol,
    pub target: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("transition {source_name} -> {target_name} : {symbol} has type {found:?}, states need ({expected_front}, {expected_rear})")]
    RankMismatch {
        source_name: String,
        target_name: String,
        symbol: String,
        found: (usize, usize),
        expected_front: usize,
        expected_rear: usize,
    },
    #[error("state id {0} out of range")]
    NoSuchState(StateId),
}

/// Automaton whose states carry ranks. Every transition's symbol has front
/// arity `rank(source)` and rear arity `rank(target)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedAutomaton {
    vocab: Vocabulary,
    states: Vec<State>,
    start: StateId,
    transitions: Vec<Transition>,
}

impl TypedAutomaton {
    pub fn new(vocab: Vocabulary) -> Self {
        Self {
            vocab,
            states: Vec::new(),
            start: 0,
            transitions: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: &str, rank: usize, is_final: bool) -> Result<StateId, AutomatonError> {
        if self.states.iter().any(|s| s.name == name) {
            return Err(AutomatonError::DuplicateState(name.to_string()));
        }
        self.states.push(State {
            name: name.to_string(),
            rank,
            is_final,
        });
        Ok((self.states.len() - 1) as StateId)
    }

    pub fn set_start(&mut self, start: StateId) {
        self.start = start;
    }

    pub fn set_final(&mut self, q: StateId, is_final: bool) {
        self.states[q as usize].is_final = is_final;
    }

    pub fn add_transition(
        &mut self,
        source: StateId,
        symbol: GraphSymbol,
        target: StateId,
    ) -> Result<usize, AutomatonError> {
        for q in [source, target] {
            if q as usize >= self.states.len() {
                return Err(AutomatonError::NoSuchState(q));
            }
        }
        let (front, rear) = symbol.symbol_type();
        let (s, t) = (&self.states[source as usize], &self.states[target as usize]);
        if front != s.rank || rear != t.rank {
            return Err(AutomatonError::RankMismatch {
                source_name: s.name.clone(),
                target_name: t.name.clone(),
                symbol: symbol.to_string(),
                found: (front, rear),
                expected_front: s.rank,
                expected_rear: t.rank,
            });
        }
        self.transitions.push(Transition {
            source,
            symbol,
            target,
        });
        Ok(self.transitions.len() - 1)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, q: StateId) -> &State {
        &self.states[q as usize]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(|i| i as StateId)
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: usize) -> &Transition {
        &self.transitions[t]
    }

    /// Indices of the transitions leaving each state, in transition order.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.source as usize].push(i);
        }
        out
    }

    pub fn finals(&self) -> Vec<StateId> {
        (0..self.states.len() as StateId)
            .filter(|&q| self.states[q as usize].is_final)
            .collect()
    }

    /// Renames every state to `q0, q1, ...` in id order.
    pub fn rename_states(&mut self) {
        for (i, s) in self.states.iter_mut().enumerate() {
            s.name = format!("q{i}");
        }
    }

    /// Whether the symbol string is accepted as a word (no graph semantics).
    pub fn accepts_word(&self, word: &[GraphSymbol]) -> bool {
        let out = self.outgoing();
        let mut current: HashSet<StateId> = HashSet::from([self.start]);
        for sym in word {
            current = current
                .iter()
                .flat_map(|&q| out[q as usize].iter())
                .map(|&t| &self.transitions[t])
                .filter(|t| &t.symbol == sym)
                .map(|t| t.target)
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&q| self.states[q as usize].is_final)
    }

    /// All accepted words of at most `max_len` symbols, up to `limit` words,
    /// shortest first.
    pub fn accepted_words(&self, max_len: usize, limit: usize) -> Vec<Vec<GraphSymbol>> {
        let out = self.outgoing();
        let coreach = self.co_reachable();
        let mut words = Vec::new();
        let mut queue: VecDeque<(StateId, Vec<usize>)> = VecDeque::from([(self.start, Vec::new())]);
        while let Some((q, path)) = queue.pop_front() {
            if self.states[q as usize].is_final && !path.is_empty() {
                words.push(path.iter().map(|&t| self.transitions[t].symbol.clone()).collect());
                if words.len() >= limit {
                    break;
                }
            }
            if path.len() == max_len {
                continue;
            }
            for &t in &out[q as usize] {
                let r = self.transitions[t].target;
                if coreach[r as usize] {
                    let mut next = path.clone();
                    next.push(t);
                    queue.push_back((r, next));
                }
            }
        }
        words
    }

    /// States from which some final state is reachable.
    pub fn co_reachable(&self) -> Vec<bool> {
        let mut incoming = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            incoming[t.target as usize].push(t.source);
        }
        let mut seen: Vec<bool> = self.states.iter().map(|s| s.is_final).collect();
        let mut stack: Vec<StateId> = self.finals();
        while let Some(q) = stack.pop() {
            for &p in &incoming[q as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    pub fn reachable(&self) -> Vec<bool> {
        let out = self.outgoing();
        let mut seen = vec![false; self.states.len()];
        if self.states.is_empty() {
            return seen;
        }
        seen[self.start as usize] = true;
        let mut stack = vec![self.start];
        while let Some(q) = stack.pop() {
            for &t in &out[q as usize] {
                let r = self.transitions[t].target;
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    stack.push(r);
                }
            }
        }
        seen
    }

    /// Keeps only the states marked in `keep` (the start state is always
    /// kept), renumbering them densely in id order.
    pub fn restrict(&self, keep: &[bool]) -> TypedAutomaton {
        let mut map = vec![None; self.states.len()];
        let mut out = TypedAutomaton::new(self.vocab.clone());
        for (i, s) in self.states.iter().enumerate() {
            if keep[i] || i as StateId == self.start {
                map[i] = Some(out.states.len() as StateId);
                out.states.push(s.clone());
            }
        }
        out.start = map[self.start as usize].expect("start kept");
        for t in &self.transitions {
            if let (Some(s), Some(r)) = (map[t.source as usize], map[t.target as usize]) {
                out.transitions.push(Transition {
                    source: s,
                    symbol: t.symbol.clone(),
                    target: r,
                });
            }
        }
        out
    }

    /// Drops states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> TypedAutomaton {
        let reach = self.reachable();
        let co = self.co_reachable();
        let keep: Vec<bool> = reach.iter().zip(&co).map(|(a, b)| *a && *b).collect();
        self.restrict(&keep)
    }
}

/// Per-run flags recorded on a compiled automaton.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DfaFlags {
    pub disambiguated: bool,
    pub deterministic: bool,
    pub minimized: bool,
    pub ts_certified: bool,
    pub fec_certified: bool,
}

/// Deterministic automaton with a per-state trial order over its atom
/// transitions and the results of the selection checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    automaton: TypedAutomaton,
    order: Vec<Vec<usize>>,
    deferrable: Vec<usize>,
    pub flags: DfaFlags,
}

impl Dfa {
    /// Wraps an automaton with the default order: atom transitions in
    /// transition order.
    pub fn new(automaton: TypedAutomaton, flags: DfaFlags) -> Self {
        let order = default_order(&automaton);
        Self {
            automaton,
            order,
            deferrable: Vec::new(),
            flags,
        }
    }

    pub fn from_parts(
        automaton: TypedAutomaton,
        order: Vec<Vec<usize>>,
        deferrable: Vec<usize>,
        flags: DfaFlags,
    ) -> Self {
        Self {
            automaton,
            order,
            deferrable,
            flags,
        }
    }

    pub fn automaton(&self) -> &TypedAutomaton {
        &self.automaton
    }

    pub fn into_automaton(self) -> TypedAutomaton {
        self.automaton
    }

    /// Ordered atom-transition indices per state.
    pub fn order(&self) -> &[Vec<usize>] {
        &self.order
    }

    pub fn set_order(&mut self, order: Vec<Vec<usize>>) {
        self.order = order;
    }

    pub fn deferrable(&self) -> &[usize] {
        &self.deferrable
    }

    pub fn set_deferrable(&mut self, deferrable: Vec<usize>) {
        self.deferrable = deferrable;
    }

    pub fn is_certified(&self) -> bool {
        self.flags.ts_certified && self.flags.fec_certified
    }

    pub fn state_count(&self) -> usize {
        self.automaton.state_count()
    }
}

pub(crate) fn default_order(a: &TypedAutomaton) -> Vec<Vec<usize>> {
    let mut order = vec![Vec::new(); a.state_count()];
    for (i, t) in a.transitions().iter().enumerate() {
        if !t.symbol.is_blank() {
            order[t.source as usize].push(i);
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_atom;

    fn two_state() -> TypedAutomaton {
        let v = Vocabulary::from_pairs([("a", 2)]).unwrap();
        let mut a = TypedAutomaton::new(v.clone());
        let p = a.add_state("p", 2, false).unwrap();
        let q = a.add_state("q", 2, true).unwrap();
        a.add_transition(p, make_atom("a", &[1, 3], &[2, 3], &v).unwrap().into(), q)
            .unwrap();
        a
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        let mut a = two_state();
        let r = a.add_state("r", 3, false).unwrap();
        let sym = make_atom("a", &[1, 3], &[2, 3], a.vocab()).unwrap();
        assert!(matches!(
            a.add_transition(0, sym.into(), r),
            Err(AutomatonError::RankMismatch { .. })
        ));
    }

    #[test]
    fn words_and_trim() {
        let mut a = two_state();
        a.add_state("dead", 2, false).unwrap();
        let sym: GraphSymbol = make_atom("a", &[1, 3], &[2, 3], a.vocab()).unwrap().into();
        a.add_transition(0, sym.clone(), 2).unwrap();
        assert!(a.accepts_word(&[sym.clone()]));
        assert!(!a.accepts_word(&[sym.clone(), sym]));
        let t = a.trim();
        assert_eq!(t.state_count(), 2);
        assert_eq!(t.transitions().len(), 1);
        assert_eq!(a.accepted_words(3, 10).len(), 1);
    }
}
