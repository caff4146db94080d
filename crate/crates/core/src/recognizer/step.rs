use crate::automaton::{StateId, TypedAutomaton};
use crate::model::{AtomSymbol, EdgeId, Graph, NodeId};

/// Why an edge is not a viable candidate for an atom step.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatchFailure {
    #[error("edge {0} was already read")]
    AlreadyRead(EdgeId),
    #[error("edge {edge} has label `{found}`, expected `{expected}`")]
    LabelMismatch { edge: EdgeId, expected: String, found: String },
    #[error("front has {found} nodes, the symbol expects {expected}")]
    FrontArity { expected: usize, found: usize },
    #[error("edge {edge} has {found} attachments, the symbol expects {expected}")]
    Arity { edge: EdgeId, expected: usize, found: usize },
    #[error("attachment {position} of edge {edge} is not the bound front node")]
    BoundMismatch { edge: EdgeId, position: usize },
    #[error("attachment {position} of edge {edge} should be fresh but was already encountered")]
    FreshEncountered { edge: EdgeId, position: usize },
}

/// State of a recognition run: current state, front, encountered nodes and
/// unread edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub state: StateId,
    pub front: Vec<NodeId>,
    pub encountered: Vec<bool>,
    pub unread: Vec<bool>,
}

impl RunConfig {
    /// Start configuration: the graph's front, all edges unread.
    pub fn initial(start: StateId, g: &Graph) -> Self {
        let mut encountered = vec![false; g.node_count()];
        for &v in g.front() {
            encountered[v as usize] = true;
        }
        Self {
            state: start,
            front: g.front().to_vec(),
            encountered,
            unread: vec![true; g.edge_count()],
        }
    }

    pub fn unread_count(&self) -> usize {
        self.unread.iter().filter(|&&u| u).count()
    }

    /// Checks the per-configuration invariants against the automaton.
    pub fn check(&self, a: &TypedAutomaton) -> Result<(), String> {
        if self.front.len() != a.state(self.state).rank {
            return Err(format!(
                "front has {} nodes at state {} of rank {}",
                self.front.len(),
                a.state(self.state).name,
                a.state(self.state).rank
            ));
        }
        for (i, &v) in self.front.iter().enumerate() {
            if self.front[..i].contains(&v) {
                return Err(format!("node {v} repeated in front"));
            }
            if !self.encountered[v as usize] {
                return Err(format!("front node {v} not encountered"));
            }
        }
        Ok(())
    }
}

/// Where a node of the new front comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Source {
    Slot(usize),
    Position(usize),
}

/// An atom symbol resolved against one input graph.
#[derive(Debug, Clone)]
pub(crate) struct AtomPattern {
    /// Graph label id, or `None` if the graph has no edge with this label.
    pub label: Option<u32>,
    pub name: String,
    pub rank: usize,
    pub front_len: usize,
    /// `(position, slot)` pairs, 0-based, sorted by position.
    pub bound: Vec<(usize, usize)>,
    pub rear: Vec<Source>,
}

impl AtomPattern {
    pub fn new(atom: &AtomSymbol, g: &Graph) -> Self {
        let label = g.labels().iter().position(|l| l == atom.label()).map(|i| i as u32);
        let rear = atom
            .rear()
            .iter()
            .map(|&node| match atom.front().iter().position(|&f| f == node) {
                Some(slot) => Source::Slot(slot),
                None => Source::Position(node - 1),
            })
            .collect();
        Self {
            label,
            name: atom.label().to_string(),
            rank: atom.rank(),
            front_len: atom.front().len(),
            bound: atom.bound_positions(),
            rear,
        }
    }

    pub fn is_bound(&self, pos: usize) -> bool {
        self.bound.iter().any(|&(p, _)| p == pos)
    }

    pub fn check(
        &self,
        g: &Graph,
        e: EdgeId,
        front: &[NodeId],
        encountered: &[bool],
    ) -> Result<(), MatchFailure> {
        if front.len() != self.front_len {
            return Err(MatchFailure::FrontArity {
                expected: self.front_len,
                found: front.len(),
            });
        }
        if Some(g.edge_label_id(e)) != self.label {
            return Err(MatchFailure::LabelMismatch {
                edge: e,
                expected: self.name.clone(),
                found: g.edge_label(e).to_string(),
            });
        }
        let att = g.attachment(e);
        if att.len() != self.rank {
            return Err(MatchFailure::Arity {
                edge: e,
                expected: self.rank,
                found: att.len(),
            });
        }
        for &(p, slot) in &self.bound {
            if att[p] != front[slot] {
                return Err(MatchFailure::BoundMismatch { edge: e, position: p + 1 });
            }
        }
        for (p, &v) in att.iter().enumerate() {
            if !self.is_bound(p) && encountered[v as usize] {
                return Err(MatchFailure::FreshEncountered { edge: e, position: p + 1 });
            }
        }
        Ok(())
    }

    pub fn matches(&self, g: &Graph, e: EdgeId, front: &[NodeId], encountered: &[bool]) -> bool {
        if Some(g.edge_label_id(e)) != self.label || front.len() != self.front_len {
            return false;
        }
        let att = g.attachment(e);
        self.bound.iter().all(|&(p, slot)| att[p] == front[slot])
            && att
                .iter()
                .enumerate()
                .all(|(p, &v)| self.is_bound(p) || !encountered[v as usize])
    }

    /// Writes the next front into `out`.
    pub fn next_front(&self, g: &Graph, e: EdgeId, front: &[NodeId], out: &mut Vec<NodeId>) {
        let att = g.attachment(e);
        out.clear();
        out.extend(self.rear.iter().map(|s| match *s {
            Source::Slot(i) => front[i],
            Source::Position(p) => att[p],
        }));
    }
}

/// One atom step on a configuration, leaving the input untouched.
pub fn apply_atom_step(
    cfg: &RunConfig,
    g: &Graph,
    atom: &AtomSymbol,
    target: StateId,
    edge: EdgeId,
) -> Result<RunConfig, MatchFailure> {
    if !cfg.unread.get(edge as usize).copied().unwrap_or(false) {
        return Err(MatchFailure::AlreadyRead(edge));
    }
    let p = AtomPattern::new(atom, g);
    p.check(g, edge, &cfg.front, &cfg.encountered)?;
    let mut next = cfg.clone();
    p.next_front(g, edge, &cfg.front, &mut next.front);
    for &v in g.attachment(edge) {
        next.encountered[v as usize] = true;
    }
    next.unread[edge as usize] = false;
    next.state = target;
    Ok(next)
}
