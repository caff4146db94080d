//! Generators for the four example languages, edge shuffling, and graph
//! mutations.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::TypedAutomaton;
use crate::model::{make_atom, EdgeId, Graph, GraphSymbol, Interpreter, NodeId, Vocabulary};
use crate::recognizer::{recognize_backtracking, RunOptions};

pub const ABC_REGEX: &str = include_str!("../langs/abc.regex");
pub const SPIKES_REGEX: &str = include_str!("../langs/spikes.regex");
pub const PALINDROMES_REGEX: &str = include_str!("../langs/palindromes.regex");
pub const WHEELS_REGEX: &str = include_str!("../langs/wheels.regex");
pub const ABC_AUTOMATON: &str = include_str!("../langs/abc.auto");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("{language} has no member with at most {edges} edges")]
    TooSmall { language: Language, edges: usize },
    #[error("a wheel needs at least 2 spokes, got {0}")]
    TooFewSpokes(usize),
    #[error("spikes variant must be 1, 2 or 3, got {0}")]
    BadVariant(usize),
    #[error("palindrome half-word must be a non-empty word over a and b")]
    BadWord,
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    Abc,
    Spikes,
    Palindromes,
    Wheels,
}

impl Language {
    pub const ALL: [Language; 4] = [Language::Abc, Language::Spikes, Language::Palindromes, Language::Wheels];

    pub fn name(self) -> &'static str {
        match self {
            Language::Abc => "abc",
            Language::Spikes => "spikes",
            Language::Palindromes => "palindromes",
            Language::Wheels => "wheels",
        }
    }

    pub fn regex(self) -> &'static str {
        match self {
            Language::Abc => ABC_REGEX,
            Language::Spikes => SPIKES_REGEX,
            Language::Palindromes => PALINDROMES_REGEX,
            Language::Wheels => WHEELS_REGEX,
        }
    }

    /// Largest member with at most `edges` edges; random choices (spikes
    /// variant, palindrome letters) come from `rng`.
    pub fn generate(self, edges: usize, rng: &mut impl Rng) -> Result<Graph, LangError> {
        let small = LangError::TooSmall { language: self, edges };
        match self {
            Language::Abc => {
                let k = (edges / 3).checked_sub(2).ok_or(small)?;
                Ok(gen_abc(k))
            }
            Language::Spikes => {
                let k = edges.checked_sub(2).ok_or(small)?;
                gen_spikes(k, rng.gen_range(1..=3))
            }
            Language::Palindromes => {
                if edges == 0 {
                    return Err(small);
                }
                let half: String = (0..edges.div_ceil(2))
                    .map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' })
                    .collect();
                gen_palindrome(&half, edges % 2 == 1)
            }
            Language::Wheels => {
                if edges < 4 {
                    return Err(small);
                }
                gen_wheel(edges / 2)
            }
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = LangError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Language::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| LangError::UnknownLanguage(s.to_string()))
    }
}

fn atom(label: &str, front: &[usize], rear: &[usize], vocab: &Vocabulary) -> GraphSymbol {
    GraphSymbol::Atom(make_atom(label, front, rear, vocab).expect("well-formed generator symbol"))
}

fn run(front: usize, parts: &[(&[GraphSymbol], usize)]) -> Graph {
    let mut it = Interpreter::with_front(front);
    for (word, times) in parts {
        for _ in 0..*times {
            for s in *word {
                it.push(s).expect("generator words are type-correct");
            }
        }
    }
    it.finish()
}

/// `S ⊙ M^k ⊙ T`: 3(k+2) edges.
pub fn gen_abc(k: usize) -> Graph {
    let v = Vocabulary::from_pairs([("a", 2), ("b", 2), ("c", 2)]).expect("vocabulary");
    let s = [atom("a", &[1, 3], &[2, 3], &v), atom("b", &[3, 2], &[3, 1, 2], &v), atom("c", &[3, 4, 1], &[3, 4, 2], &v)];
    let m = [atom("a", &[1, 3, 4], &[2, 3, 4], &v), atom("b", &[3, 2, 4], &[3, 1, 4], &v), atom("c", &[3, 4, 1], &[3, 4, 2], &v)];
    let t = [atom("a", &[1, 3, 4], &[2, 3, 4], &v), atom("b", &[1, 2, 3], &[3], &v), atom("c", &[1], &[], &v)];
    run(2, &[(&s, 1), (&m, k), (&t, 1)])
}

/// Spikes word of one alternative (1, 2 or 3) with `k` loop iterations: k+2 edges.
pub fn gen_spikes(k: usize, variant: usize) -> Result<Graph, LangError> {
    let v = Vocabulary::from_pairs([("s", 3)]).expect("vocabulary");
    let (first, lp, last): (&[usize; 6], &[usize; 6], &[usize; 3]) = match variant {
        1 => (&[1, 2, 4, 1, 3, 4], &[1, 3, 4, 1, 2, 4], &[1, 2, 3]),
        2 => (&[4, 2, 3, 4, 2, 1], &[4, 2, 1, 4, 2, 3], &[3, 2, 1]),
        3 => (&[1, 4, 3, 2, 4, 3], &[2, 4, 3, 1, 4, 3], &[1, 2, 3]),
        other => return Err(LangError::BadVariant(other)),
    };
    let first = [atom("s", &first[..3], &first[3..], &v)];
    let lp = [atom("s", &lp[..3], &lp[3..], &v)];
    let last = [atom("s", last, &[], &v)];
    Ok(run(3, &[(&first, 1), (&lp, k), (&last, 1)]))
}

/// Palindrome mirrored from `half`; with `odd` the last letter of `half` is
/// the center. Edges: 2|half| or 2|half| - 1.
pub fn gen_palindrome(half: &str, odd: bool) -> Result<Graph, LangError> {
    if half.is_empty() || half.chars().any(|c| c != 'a' && c != 'b') {
        return Err(LangError::BadWord);
    }
    let v = Vocabulary::from_pairs([("a", 2), ("b", 2)]).expect("vocabulary");
    let mut it = Interpreter::with_front(2);
    let letters: Vec<String> = half.chars().map(String::from).collect();
    let (init, last) = letters.split_at(letters.len() - 1);
    for l in init {
        for s in [atom(l, &[1, 3], &[2, 3], &v), atom(l, &[3, 2], &[3, 1], &v)] {
            it.push(&s).expect("type-correct");
        }
    }
    let l = &last[0];
    if !odd {
        it.push(&atom(l, &[1, 3], &[2, 3], &v)).expect("type-correct");
    }
    it.push(&atom(l, &[1, 2], &[], &v)).expect("type-correct");
    Ok(it.finish())
}

/// Wheel with `spokes` spokes: a rim cycle of t-edges plus s-edges from the
/// hub, 2·spokes edges.
pub fn gen_wheel(spokes: usize) -> Result<Graph, LangError> {
    if spokes < 2 {
        return Err(LangError::TooFewSpokes(spokes));
    }
    let v = Vocabulary::from_pairs([("t", 2), ("s", 2)]).expect("vocabulary");
    let start = [atom("t", &[], &[1, 2], &v), atom("s", &[3, 2], &[1, 2, 3], &v)];
    let lp = [atom("t", &[3, 1, 4], &[3, 2, 4], &v), atom("s", &[1, 2, 3], &[1, 2, 3], &v)];
    let end = [atom("t", &[3, 1, 2], &[3, 2], &v), atom("s", &[1, 2], &[], &v)];
    Ok(run(0, &[(&start, 1), (&lp, spokes - 2), (&end, 1)]))
}

/// The edge permutation drawn from `seed`.
pub fn shuffle_permutation(edges: usize, seed: u64) -> Vec<EdgeId> {
    let mut perm: Vec<EdgeId> = (0..edges as EdgeId).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

/// Same graph with its edge list randomly permuted.
pub fn shuffle_edges(g: &Graph, seed: u64) -> Graph {
    g.permute_edges(&shuffle_permutation(g.edge_count(), seed))
}

/// Kinds of single-edit mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Relabel,
    SwapAttachments,
    DeleteEdge,
    Retarget,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [Mutation::Relabel, Mutation::SwapAttachments, Mutation::DeleteEdge, Mutation::Retarget];
}

/// Applies one mutation at random positions. Returns `None` when the edit
/// is impossible (no other label, rank-1 edge, repeated attachment).
pub fn mutate(g: &Graph, vocab: &Vocabulary, kind: Mutation, rng: &mut impl Rng) -> Option<Graph> {
    if g.edge_count() == 0 {
        return None;
    }
    let target = rng.gen_range(0..g.edge_count()) as EdgeId;
    let mut edges: Vec<(String, Vec<NodeId>)> = g
        .edges()
        .map(|(_, l, att)| (l.to_string(), att.to_vec()))
        .collect();
    let (label, att) = &mut edges[target as usize];
    match kind {
        Mutation::Relabel => {
            let rank = att.len();
            let others: Vec<&str> = vocab
                .iter()
                .filter(|&(l, r)| r == rank && l != label)
                .map(|(l, _)| l)
                .collect();
            *label = (*others.get(rng.gen_range(0..others.len().max(1)))?).to_string();
        }
        Mutation::SwapAttachments => {
            if att.len() < 2 {
                return None;
            }
            let i = rng.gen_range(0..att.len());
            let j = (i + rng.gen_range(1..att.len())) % att.len();
            att.swap(i, j);
        }
        Mutation::DeleteEdge => {
            edges.remove(target as usize);
        }
        Mutation::Retarget => {
            let i = rng.gen_range(0..att.len());
            let v = rng.gen_range(0..g.node_count()) as NodeId;
            if att.contains(&v) {
                return None;
            }
            att[i] = v;
        }
    }
    let mut out = Graph::with_capacity(g.node_count(), edges.len(), 0);
    for (l, att) in &edges {
        out.add_edge(l, att);
    }
    out.set_front(g.front().to_vec());
    out.set_rear(g.rear().to_vec());
    Some(out)
}

/// `count` mutants of `members` that the backtracking recognizer on `a`
/// rejects. Mutants that stay in the language are discarded.
pub fn non_member_mutants(a: &TypedAutomaton, members: &[Graph], count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let opts = RunOptions {
        witness: false,
        ..RunOptions::default()
    };
    let mut attempts = 0usize;
    while out.len() < count && !members.is_empty() && attempts < count * 100 {
        attempts += 1;
        let g = &members[rng.gen_range(0..members.len())];
        let kind = Mutation::ALL[rng.gen_range(0..4)];
        let Some(m) = mutate(g, a.vocab(), kind, &mut rng) else { continue };
        if let Ok(r) = recognize_backtracking(a, &m, &opts) {
            if !r.accepted {
                out.push(m);
            }
        }
    }
    out
}
