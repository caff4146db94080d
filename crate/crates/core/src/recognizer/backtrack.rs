use crate::automaton::{StateId, TypedAutomaton};
use crate::index::incidence;
use crate::model::{EdgeId, Graph, GraphSymbol, NodeId};

use super::step::{AtomPattern, RunConfig};
use super::{precheck, witness_from, Recognition, RecognizeError, RunOptions, TraceStep};

enum Move {
    Atom(AtomPattern),
    Blank(Vec<usize>),
}

struct Undo {
    transition: usize,
    edge: Option<EdgeId>,
    front: Vec<NodeId>,
    newly: Vec<NodeId>,
    /// Blank chain of the parent level, saved by an atom step.
    chain: Option<Vec<usize>>,
}

struct Frame {
    state: StateId,
    t_pos: usize,
    candidates: Vec<EdgeId>,
    c_pos: usize,
    loaded: bool,
    undo: Option<Undo>,
}

impl Frame {
    fn new(state: StateId) -> Self {
        Self {
            state,
            t_pos: 0,
            candidates: Vec::new(),
            c_pos: 0,
            loaded: false,
            undo: None,
        }
    }
}

struct Search<'a> {
    a: &'a TypedAutomaton,
    g: &'a Graph,
    out: Vec<Vec<usize>>,
    moves: Vec<Move>,
    inc_off: Vec<u32>,
    inc: Vec<(EdgeId, u32)>,
    by_label: Vec<Vec<EdgeId>>,
    in_rear: Vec<bool>,
    cfg: RunConfig,
    unread_count: usize,
    /// Blank transitions followed since the last atom step.
    chain: Vec<usize>,
    scratch: Vec<NodeId>,
    check: bool,
}

impl<'a> Search<'a> {
    fn new(a: &'a TypedAutomaton, g: &'a Graph, check: bool) -> Self {
        let moves = a
            .transitions()
            .iter()
            .map(|t| match &t.symbol {
                GraphSymbol::Atom(x) => Move::Atom(AtomPattern::new(x, g)),
                GraphSymbol::Blank(b) => Move::Blank(b.rear().to_vec()),
            })
            .collect();
        let (inc_off, inc) = incidence(g);
        let mut by_label = vec![Vec::new(); g.labels().len()];
        for e in 0..g.edge_count() as EdgeId {
            by_label[g.edge_label_id(e) as usize].push(e);
        }
        let mut in_rear = vec![false; g.node_count()];
        for &v in g.rear() {
            in_rear[v as usize] = true;
        }
        Self {
            a,
            g,
            out: a.outgoing(),
            moves,
            inc_off,
            inc,
            by_label,
            in_rear,
            cfg: RunConfig::initial(a.start(), g),
            unread_count: g.edge_count(),
            chain: Vec::new(),
            scratch: Vec::new(),
            check,
        }
    }

    fn accepting(&self, q: StateId) -> bool {
        self.unread_count == 0 && self.a.state(q).is_final && self.cfg.front == self.g.rear()
    }

    fn candidates(&self, p: &AtomPattern) -> Vec<EdgeId> {
        let Some(label) = p.label else { return Vec::new() };
        match p.bound.first() {
            Some(&(pos, slot)) => {
                let v = self.cfg.front[slot] as usize;
                let (lo, hi) = (self.inc_off[v] as usize, self.inc_off[v + 1] as usize);
                self.inc[lo..hi]
                    .iter()
                    .filter(|&&(e, q)| q as usize == pos && self.g.edge_label_id(e) == label)
                    .map(|&(e, _)| e)
                    .filter(|&e| self.cfg.unread[e as usize])
                    .collect()
            }
            None => self.by_label[label as usize]
                .iter()
                .copied()
                .filter(|&e| self.cfg.unread[e as usize])
                .collect(),
        }
    }

    /// A node that leaves the front can never return, so it must not be in
    /// the rear or have unread edges left.
    fn viable(&self, old_front: &[NodeId]) -> bool {
        old_front.iter().filter(|v| !self.cfg.front.contains(v)).all(|&v| {
            let v = v as usize;
            !self.in_rear[v]
                && self.inc[self.inc_off[v] as usize..self.inc_off[v + 1] as usize]
                    .iter()
                    .all(|&(e, _)| !self.cfg.unread[e as usize])
        })
    }

    fn apply_atom(&mut self, t: usize, e: EdgeId) -> Undo {
        let Move::Atom(p) = &self.moves[t] else { unreachable!("atom move") };
        p.next_front(self.g, e, &self.cfg.front, &mut self.scratch);
        let front = std::mem::replace(&mut self.cfg.front, std::mem::take(&mut self.scratch));
        let mut newly = Vec::new();
        for &v in self.g.attachment(e) {
            if !self.cfg.encountered[v as usize] {
                self.cfg.encountered[v as usize] = true;
                newly.push(v);
            }
        }
        self.cfg.unread[e as usize] = false;
        self.unread_count -= 1;
        self.cfg.state = self.a.transition(t).target;
        Undo {
            transition: t,
            edge: Some(e),
            front,
            newly,
            chain: Some(std::mem::take(&mut self.chain)),
        }
    }

    fn apply_blank(&mut self, t: usize) -> Undo {
        let Move::Blank(rear) = &self.moves[t] else { unreachable!("blank move") };
        let next: Vec<NodeId> = rear.iter().map(|&i| self.cfg.front[i - 1]).collect();
        let front = std::mem::replace(&mut self.cfg.front, next);
        self.chain.push(t);
        self.cfg.state = self.a.transition(t).target;
        Undo {
            transition: t,
            edge: None,
            front,
            newly: Vec::new(),
            chain: None,
        }
    }

    fn undo(&mut self, u: Undo) {
        self.cfg.state = self.a.transition(u.transition).source;
        self.scratch = std::mem::replace(&mut self.cfg.front, u.front);
        match u.edge {
            Some(e) => {
                self.cfg.unread[e as usize] = true;
                self.unread_count += 1;
                for v in u.newly {
                    self.cfg.encountered[v as usize] = false;
                }
                self.chain = u.chain.expect("atom undo keeps chain");
            }
            None => {
                self.chain.pop();
            }
        }
    }

    /// Applies the next untried choice of `frame`, returning the new state.
    fn advance(&mut self, frame: &mut Frame) -> Option<StateId> {
        let q = frame.state as usize;
        while frame.t_pos < self.out[q].len() {
            let t = self.out[q][frame.t_pos];
            match &self.moves[t] {
                Move::Atom(p) => {
                    if !frame.loaded {
                        frame.candidates = self.candidates(p);
                        frame.c_pos = 0;
                        frame.loaded = true;
                    }
                    while frame.c_pos < frame.candidates.len() {
                        let e = frame.candidates[frame.c_pos];
                        frame.c_pos += 1;
                        let Move::Atom(p) = &self.moves[t] else { unreachable!() };
                        if !p.matches(self.g, e, &self.cfg.front, &self.cfg.encountered) {
                            continue;
                        }
                        let u = self.apply_atom(t, e);
                        if self.viable(&u.front) {
                            frame.undo = Some(u);
                            return Some(self.cfg.state);
                        }
                        self.undo(u);
                    }
                    frame.t_pos += 1;
                    frame.loaded = false;
                }
                Move::Blank(_) => {
                    frame.t_pos += 1;
                    if self.chain.contains(&t) {
                        continue;
                    }
                    let u = self.apply_blank(t);
                    if self.viable(&u.front) {
                        frame.undo = Some(u);
                        return Some(self.cfg.state);
                    }
                    self.undo(u);
                }
            }
        }
        None
    }
}

/// Depth-first search over all runs, trying transitions in automaton order
/// and candidate edges in ascending id order. Each blank transition is
/// followed at most once between two atom steps.
pub fn recognize_backtracking(
    a: &TypedAutomaton,
    g: &Graph,
    opts: &RunOptions,
) -> Result<Recognition, RecognizeError> {
    if !precheck(a, g) {
        return Ok(Recognition::reject(0));
    }
    let mut s = Search::new(a, g, opts.check_invariants);
    let mut stack = vec![Frame::new(a.start())];
    let mut steps = 0u64;
    let mut accepted = s.accepting(a.start());
    while !accepted {
        let Some(mut top) = stack.pop() else {
            return Ok(Recognition::reject(steps));
        };
        if let Some(u) = top.undo.take() {
            s.undo(u);
        }
        let Some(q) = s.advance(&mut top) else { continue };
        stack.push(top);
        steps += 1;
        if s.check {
            s.cfg.check(a).map_err(RecognizeError::Invariant)?;
        }
        if steps >= opts.budget {
            return Err(RecognizeError::BudgetExhausted { steps });
        }
        accepted = s.accepting(q);
        stack.push(Frame::new(q));
    }

    let path: Vec<&Undo> = stack.iter().filter_map(|f| f.undo.as_ref()).collect();
    let moves: Vec<(usize, Option<EdgeId>)> = path.iter().map(|u| (u.transition, u.edge)).collect();
    let trace = if opts.trace {
        // Fronts after each step: the saved front of the following step, then the current one.
        let mut fronts: Vec<Vec<NodeId>> = path.iter().skip(1).map(|u| u.front.clone()).collect();
        fronts.push(s.cfg.front.clone());
        moves
            .iter()
            .zip(fronts)
            .map(|(&(t, edge), front)| TraceStep {
                source: a.transition(t).source,
                transition: t,
                edge,
                front,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(Recognition {
        accepted: true,
        witness: opts.witness.then(|| witness_from(a, g, &moves)),
        trace,
        steps,
    })
}
