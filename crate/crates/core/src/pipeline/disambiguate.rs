//! Removes internal blank transitions and splits atom transitions whose
//! symbols collide on `(label, front)` with a different rear.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::PipelineError;
use crate::automaton::{StateId, TypedAutomaton};
use crate::model::{compose, AtomSymbol, BlankSymbol, GraphSymbol};

#[derive(Debug, Clone, Copy)]
pub struct DisambiguationLimits {
    pub max_rounds: usize,
    pub max_states: usize,
}

impl Default for DisambiguationLimits {
    fn default() -> Self {
        Self {
            max_rounds: 64,
            max_states: 20_000,
        }
    }
}

/// An atom `original` replaced by `canonical` followed by `blank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub original: AtomSymbol,
    pub canonical: AtomSymbol,
    pub blank: BlankSymbol,
}

#[derive(Debug, Clone)]
pub struct Disambiguated {
    pub automaton: TypedAutomaton,
    pub rewrites: Vec<Rewrite>,
}

#[derive(Debug, Clone)]
struct Work {
    ranks: Vec<usize>,
    finals: Vec<bool>,
    out: Vec<Vec<(GraphSymbol, usize)>>,
    start: usize,
    sinks: HashMap<usize, usize>,
}

impl Work {
    fn from_automaton(a: &TypedAutomaton) -> Self {
        let mut out = vec![Vec::new(); a.state_count()];
        for t in a.transitions() {
            out[t.source as usize].push((t.symbol.clone(), t.target as usize));
        }
        Self {
            ranks: a.states().iter().map(|s| s.rank).collect(),
            finals: a.states().iter().map(|s| s.is_final).collect(),
            out,
            start: a.start() as usize,
            sinks: HashMap::new(),
        }
    }

    fn add_state(&mut self, rank: usize, is_final: bool) -> usize {
        self.ranks.push(rank);
        self.finals.push(is_final);
        self.out.push(Vec::new());
        self.ranks.len() - 1
    }

    fn sink(&mut self, rank: usize) -> usize {
        if let Some(&s) = self.sinks.get(&rank) {
            return s;
        }
        let s = self.add_state(rank, true);
        self.sinks.insert(rank, s);
        s
    }

    /// Appends `q --blank--> (final)` semantics: identity blanks make `q` final,
    /// others go to the sink of the blank's rear arity.
    fn add_tail(&mut self, q: usize, blank: BlankSymbol) {
        if blank.is_identity() {
            self.finals[q] = true;
        } else {
            let s = self.sink(blank.rear().len());
            push_unique(&mut self.out[q], (blank.into(), s));
        }
    }

    fn into_automaton(self, template: &TypedAutomaton) -> TypedAutomaton {
        let mut a = TypedAutomaton::new(template.vocab().clone());
        for (i, (&rank, &f)) in self.ranks.iter().zip(&self.finals).enumerate() {
            a.add_state(&format!("q{i}"), rank, f).expect("fresh names");
        }
        a.set_start(self.start as StateId);
        for (q, ts) in self.out.into_iter().enumerate() {
            for (s, r) in ts {
                a.add_transition(q as StateId, s, r as StateId)
                    .expect("rewrites preserve types");
            }
        }
        let mut a = a.trim();
        a.rename_states();
        a
    }
}

fn push_unique(v: &mut Vec<(GraphSymbol, usize)>, t: (GraphSymbol, usize)) {
    if !v.contains(&t) {
        v.push(t);
    }
}

/// Replaces every blank transition that does not end in a final sink by
/// compositions with the atoms that follow it.
fn eliminate_blanks(w: &mut Work) {
    let n = w.ranks.len();
    let mut new_out: Vec<Vec<(GraphSymbol, usize)>> = Vec::with_capacity(n);
    let mut tails: Vec<Vec<BlankSymbol>> = vec![Vec::new(); n];
    for q in 0..n {
        let mut keep: Vec<(GraphSymbol, usize)> = Vec::new();
        let mut seen: HashSet<(usize, BlankSymbol)> = HashSet::new();
        let mut queue: VecDeque<(usize, BlankSymbol)> = VecDeque::new();
        for (s, r) in &w.out[q] {
            match s {
                GraphSymbol::Atom(_) => push_unique(&mut keep, (s.clone(), *r)),
                GraphSymbol::Blank(b) => {
                    if seen.insert((*r, b.clone())) {
                        queue.push_back((*r, b.clone()));
                    }
                }
            }
        }
        while let Some((r, blank)) = queue.pop_front() {
            if w.finals[r] {
                tails[q].push(blank.clone());
            }
            for (s, t) in &w.out[r] {
                let composed = compose(&blank, s).expect("types chain");
                match composed {
                    GraphSymbol::Atom(_) => push_unique(&mut keep, (composed, *t)),
                    GraphSymbol::Blank(b) => {
                        if seen.insert((*t, b.clone())) {
                            queue.push_back((*t, b));
                        }
                    }
                }
            }
        }
        new_out.push(keep);
    }
    w.out = new_out;
    for (q, blanks) in tails.into_iter().enumerate() {
        for b in blanks {
            w.add_tail(q, b);
        }
    }
}

type Subset = Vec<usize>;

/// Transitions `(state, index)` that share `(label, front)` with a
/// transition of a different symbol inside some reachable subset.
fn find_conflicts(w: &Work, max_subsets: usize) -> Result<BTreeSet<(usize, usize)>, PipelineError> {
    let mut conflicts = BTreeSet::new();
    let mut seen: HashSet<Subset> = HashSet::new();
    let mut queue: VecDeque<Subset> = VecDeque::new();
    seen.insert(vec![w.start]);
    queue.push_back(vec![w.start]);
    while let Some(set) = queue.pop_front() {
        if seen.len() > max_subsets {
            return Err(PipelineError::Diverged {
                states: seen.len(),
            });
        }
        let mut by_key: BTreeMap<(&str, &[usize]), Vec<(usize, usize)>> = BTreeMap::new();
        let mut by_symbol: BTreeMap<&GraphSymbol, BTreeSet<usize>> = BTreeMap::new();
        for &q in &set {
            for (i, (s, r)) in w.out[q].iter().enumerate() {
                if let GraphSymbol::Atom(a) = s {
                    by_key.entry((a.label(), a.front())).or_default().push((q, i));
                }
                by_symbol.entry(s).or_default().insert(*r);
            }
        }
        for members in by_key.values() {
            let first = &w.out[members[0].0][members[0].1].0;
            if members.iter().any(|&(q, i)| &w.out[q][i].0 != first) {
                conflicts.extend(members.iter().copied());
            }
        }
        for targets in by_symbol.into_values() {
            let next: Subset = targets.into_iter().collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(conflicts)
}

pub fn disambiguate(a: &TypedAutomaton) -> Result<Disambiguated, PipelineError> {
    disambiguate_with(a, DisambiguationLimits::default())
}

pub fn disambiguate_with(
    a: &TypedAutomaton,
    limits: DisambiguationLimits,
) -> Result<Disambiguated, PipelineError> {
    let mut w = Work::from_automaton(a);
    eliminate_blanks(&mut w);
    let mut rewrites = Vec::new();
    let mut hats: HashMap<(usize, BlankSymbol), usize> = HashMap::new();
    for _ in 0..limits.max_rounds {
        let conflicts = find_conflicts(&w, limits.max_states)?;
        let conflicts: Vec<(usize, usize)> = conflicts
            .into_iter()
            .filter(|&(q, i)| w.out[q][i].0.as_atom().is_some_and(|a| !a.has_canonical_rear()))
            .collect();
        if conflicts.is_empty() {
            return Ok(Disambiguated {
                automaton: w.into_automaton(a),
                rewrites,
            });
        }
        for (q, i) in conflicts {
            let (sym, r) = w.out[q][i].clone();
            let atom = sym.as_atom().expect("atom").clone();
            let canonical = atom.canonical();
            let blank = BlankSymbol::new(atom.n(), atom.rear().to_vec()).expect("atom rears are valid");
            let hat = match hats.get(&(r, blank.clone())) {
                Some(&h) => h,
                None => {
                    let h = w.add_state(atom.n(), false);
                    let succ = w.out[r].clone();
                    for (s, t) in succ {
                        match compose(&blank, &s).expect("types chain") {
                            GraphSymbol::Blank(b) => w.add_tail(h, b),
                            other => push_unique(&mut w.out[h], (other, t)),
                        }
                    }
                    if w.finals[r] {
                        w.add_tail(h, blank.clone());
                    }
                    hats.insert((r, blank.clone()), h);
                    h
                }
            };
            w.out[q][i] = (canonical.clone().into(), hat);
            rewrites.push(Rewrite {
                original: atom,
                canonical,
                blank,
            });
        }
        for q in 0..w.out.len() {
            let mut dedup = Vec::new();
            for t in std::mem::take(&mut w.out[q]) {
                push_unique(&mut dedup, t);
            }
            w.out[q] = dedup;
        }
        if w.ranks.len() > limits.max_states {
            return Err(PipelineError::Diverged {
                states: w.ranks.len(),
            });
        }
    }
    Err(PipelineError::Diverged {
        states: w.ranks.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_automaton_spec;

    #[test]
    fn differing_rears_are_split() {
        let a = parse_automaton_spec(
            "symbol a(2), b(1)\n\
             state q(1), r1(1), r2(2), *f(0)\n\
             start q\n\
             q -> r1 : a^1_2\n\
             q -> r2 : a^1_12\n\
             r1 -> f : b^1_<>\n\
             r2 -> f : a^12_<>\n",
        )
        .unwrap();
        let d = disambiguate(&a).unwrap();
        let from_start: Vec<_> = d
            .automaton
            .transitions()
            .iter()
            .filter(|t| t.source == d.automaton.start())
            .map(|t| t.symbol.to_string())
            .collect();
        assert_eq!(from_start, vec!["a^1_12", "a^1_12"]);
        assert_eq!(d.rewrites.len(), 1);
        assert!(d.automaton.transitions().iter().all(|t| !t.symbol.is_blank()));
        let words: Vec<String> = d
            .automaton
            .accepted_words(3, 10)
            .iter()
            .map(|w| w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        assert!(words.contains(&"a^1_12 b^21_<>".to_string()), "{words:?}");
    }

    #[test]
    fn internal_blanks_are_composed_away() {
        let a = parse_automaton_spec(
            "symbol a(2)\n\
             state p(2), q(2), *r(1)\n\
             start p\n\
             p -> q : <>^2_21\n\
             q -> r : a^12_2\n\
             q -> q : <>^2_21\n",
        )
        .unwrap();
        let d = disambiguate(&a).unwrap();
        let syms: BTreeSet<String> = d.automaton.transitions().iter().map(|t| t.symbol.to_string()).collect();
        assert!(syms.contains("a^21_2"), "{syms:?}");
        assert!(syms.contains("a^12_2"), "{syms:?}");
        assert!(d.automaton.transitions().iter().all(|t| !t.symbol.is_blank()));
    }

    #[test]
    fn trailing_blank_goes_to_sink() {
        let a = parse_automaton_spec(
            "symbol a(2)\n\
             state p(2), q(2), *r(1)\n\
             start p\n\
             p -> q : a^13_23\n\
             q -> r : <>^2_2\n",
        )
        .unwrap();
        let d = disambiguate(&a).unwrap().automaton;
        let out = d.outgoing();
        for t in d.transitions() {
            if t.symbol.is_blank() {
                assert!(d.state(t.target).is_final);
                assert!(out[t.target as usize].is_empty());
            }
        }
        assert_eq!(d.transitions().iter().filter(|t| t.symbol.is_blank()).count(), 1);
    }

    #[test]
    fn canonical_input_is_unchanged() {
        let text = "symbol a(2), c(2)\nstate q0(2), q1(2), *q2(0)\nstart q0\nq0 -> q1 : a^13_23\nq1 -> q1 : a^13_23\nq1 -> q2 : c^12_<>\n";
        let a = parse_automaton_spec(text).unwrap();
        let d = disambiguate(&a).unwrap();
        assert!(d.rewrites.is_empty());
        assert_eq!(d.automaton, a);
    }
}
