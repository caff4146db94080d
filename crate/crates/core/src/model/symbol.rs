use std::collections::HashMap;
use std::fmt;

use super::ModelError;

/// Ranked alphabet of edge labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, usize)>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `label` with the given rank. Rank-0 labels are rejected.
    pub fn declare(&mut self, label: &str, rank: usize) -> Result<usize, ModelError> {
        if rank == 0 {
            return Err(ModelError::ZeroRank(label.to_string()));
        }
        if self.index.contains_key(label) {
            return Err(ModelError::DuplicateLabel(label.to_string()));
        }
        let id = self.entries.len();
        self.entries.push((label.to_string(), rank));
        self.index.insert(label.to_string(), id);
        Ok(id)
    }

    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = (&'a str, usize)>,
    ) -> Result<Self, ModelError> {
        let mut vocab = Self::new();
        for (label, rank) in pairs {
            vocab.declare(label, rank)?;
        }
        Ok(vocab)
    }

    pub fn rank(&self, label: &str) -> Option<usize> {
        self.id(label).map(|id| self.entries[id].1)
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: usize) -> &str {
        &self.entries[id].0
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.entries.iter().map(|(l, r)| (l.as_str(), *r))
    }

    /// Adds every label of `other` not yet declared here; fails on rank conflicts.
    pub fn merge(&mut self, other: &Vocabulary) -> Result<(), ModelError> {
        for (label, rank) in other.iter() {
            match self.rank(label) {
                Some(r) if r == rank => {}
                Some(r) => {
                    return Err(ModelError::RankConflict {
                        label: label.to_string(),
                        first: r,
                        second: rank,
                    })
                }
                None => {
                    self.declare(label, rank)?;
                }
            }
        }
        Ok(())
    }
}

/// Atom symbol `label^front_rear`. Indices are 1-based node numbers of the
/// elementary graph; the edge is attached to nodes `1..=rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSymbol {
    label: String,
    rank: usize,
    front: Vec<usize>,
    rear: Vec<usize>,
}

/// Blank symbol `<>^n_rear`: a discrete graph on `n` nodes, all in the front.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankSymbol {
    n: usize,
    rear: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphSymbol {
    Atom(AtomSymbol),
    Blank(BlankSymbol),
}

fn check_repetition_free(seq: &[usize], what: &'static str) -> Result<(), ModelError> {
    for (i, &x) in seq.iter().enumerate() {
        if x == 0 {
            return Err(ModelError::ZeroIndex { part: what });
        }
        if seq[..i].contains(&x) {
            return Err(ModelError::RepeatedIndex { part: what, index: x });
        }
    }
    Ok(())
}

/// Validates and builds an atom symbol against a vocabulary.
pub fn make_atom(
    label: &str,
    front: &[usize],
    rear: &[usize],
    vocab: &Vocabulary,
) -> Result<AtomSymbol, ModelError> {
    let rank = vocab
        .rank(label)
        .ok_or_else(|| ModelError::UnknownLabel(label.to_string()))?;
    AtomSymbol::new(label, rank, front.to_vec(), rear.to_vec())
}

pub fn make_blank(n: usize, rear: &[usize]) -> Result<BlankSymbol, ModelError> {
    BlankSymbol::new(n, rear.to_vec())
}

impl AtomSymbol {
    pub fn new(
        label: &str,
        rank: usize,
        front: Vec<usize>,
        rear: Vec<usize>,
    ) -> Result<Self, ModelError> {
        check_repetition_free(&front, "front")?;
        check_repetition_free(&rear, "rear")?;
        for &r in &rear {
            if r > rank && !front.contains(&r) {
                return Err(ModelError::RearUnreachable { node: r });
            }
        }
        let n = front.iter().copied().max().unwrap_or(0).max(rank);
        for i in rank + 1..=n {
            if !front.contains(&i) {
                return Err(ModelError::OrphanNode { node: i });
            }
        }
        Ok(Self {
            label: label.to_string(),
            rank,
            front,
            rear,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn front(&self) -> &[usize] {
        &self.front
    }

    pub fn rear(&self) -> &[usize] {
        &self.rear
    }

    /// Node count of the elementary graph.
    pub fn n(&self) -> usize {
        self.front.iter().copied().max().unwrap_or(0).max(self.rank)
    }

    pub fn symbol_type(&self) -> (usize, usize) {
        (self.front.len(), self.rear.len())
    }

    /// True when the rear enumerates every node in order.
    pub fn has_canonical_rear(&self) -> bool {
        self.rear.iter().copied().eq(1..=self.n())
    }

    /// Same label and front with rear `1..=n`.
    pub fn canonical(&self) -> AtomSymbol {
        AtomSymbol {
            label: self.label.clone(),
            rank: self.rank,
            front: self.front.clone(),
            rear: (1..=self.n()).collect(),
        }
    }

    /// `(attachment position, front slot)` pairs for positions bound by the front,
    /// both 0-based, in attachment order.
    pub fn bound_positions(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .front
            .iter()
            .enumerate()
            .filter(|(_, &node)| node <= self.rank)
            .map(|(slot, &node)| (node - 1, slot))
            .collect();
        out.sort_unstable();
        out
    }
}

impl BlankSymbol {
    pub fn new(n: usize, rear: Vec<usize>) -> Result<Self, ModelError> {
        check_repetition_free(&rear, "rear")?;
        if let Some(&bad) = rear.iter().find(|&&r| r > n) {
            return Err(ModelError::RearUnreachable { node: bad });
        }
        Ok(Self { n, rear })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            rear: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rear(&self) -> &[usize] {
        &self.rear
    }

    pub fn symbol_type(&self) -> (usize, usize) {
        (self.n, self.rear.len())
    }

    pub fn is_identity(&self) -> bool {
        self.rear.iter().copied().eq(1..=self.n)
    }
}

impl GraphSymbol {
    pub fn symbol_type(&self) -> (usize, usize) {
        match self {
            GraphSymbol::Atom(a) => a.symbol_type(),
            GraphSymbol::Blank(b) => b.symbol_type(),
        }
    }

    pub fn front_arity(&self) -> usize {
        self.symbol_type().0
    }

    pub fn rear_arity(&self) -> usize {
        self.symbol_type().1
    }

    pub fn as_atom(&self) -> Option<&AtomSymbol> {
        match self {
            GraphSymbol::Atom(a) => Some(a),
            GraphSymbol::Blank(_) => None,
        }
    }

    pub fn as_blank(&self) -> Option<&BlankSymbol> {
        match self {
            GraphSymbol::Blank(b) => Some(b),
            GraphSymbol::Atom(_) => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, GraphSymbol::Blank(_))
    }

    pub fn label(&self) -> Option<&str> {
        self.as_atom().map(AtomSymbol::label)
    }
}

impl From<AtomSymbol> for GraphSymbol {
    fn from(a: AtomSymbol) -> Self {
        GraphSymbol::Atom(a)
    }
}

impl From<BlankSymbol> for GraphSymbol {
    fn from(b: BlankSymbol) -> Self {
        GraphSymbol::Blank(b)
    }
}

/// Concatenation of a blank with a following symbol, as a single symbol.
///
/// Blank nodes that the blank drops become front-only nodes of the composed
/// atom, numbered above the atom's own nodes.
pub fn compose(blank: &BlankSymbol, next: &GraphSymbol) -> Result<GraphSymbol, ModelError> {
    if blank.rear.len() != next.front_arity() {
        return Err(ModelError::TypeMismatch {
            rear: blank.rear.len(),
            front: next.front_arity(),
        });
    }
    match next {
        GraphSymbol::Blank(b2) => {
            let rear = b2.rear.iter().map(|&i| blank.rear[i - 1]).collect();
            Ok(BlankSymbol::new(blank.n, rear)?.into())
        }
        GraphSymbol::Atom(atom) => {
            let mut fresh = atom.n();
            let front = (1..=blank.n)
                .map(|j| match blank.rear.iter().position(|&r| r == j) {
                    Some(i) => atom.front[i],
                    None => {
                        fresh += 1;
                        fresh
                    }
                })
                .collect();
            Ok(AtomSymbol::new(&atom.label, atom.rank, front, atom.rear.clone())?.into())
        }
    }
}

pub(crate) fn fmt_seq(seq: &[usize]) -> String {
    if seq.is_empty() {
        "<>".to_string()
    } else if seq.iter().all(|&i| (1..=9).contains(&i)) {
        seq.iter().map(|i| char::from(b'0' + *i as u8)).collect()
    } else {
        let parts: Vec<String> = seq.iter().map(|i| i.to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Display for AtomSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}_{}", self.label, fmt_seq(&self.front), fmt_seq(&self.rear))
    }
}

impl fmt::Display for BlankSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<>^{}_{}", self.n, fmt_seq(&self.rear))
    }
}

impl fmt::Display for GraphSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSymbol::Atom(a) => a.fmt(f),
            GraphSymbol::Blank(b) => b.fmt(f),
        }
    }
}
