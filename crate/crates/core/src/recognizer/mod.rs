//! Graph recognition against typed automata: a backtracking search for any
//! automaton and a linear greedy run for certified DFAs.

mod backtrack;
mod linear;
mod step;

use std::fmt;

pub use backtrack::recognize_backtracking;
pub use linear::{recognize_linear, IndexMode, LinearRun};
pub use step::{apply_atom_step, MatchFailure, RunConfig};

use crate::automaton::{StateId, TypedAutomaton};
use crate::index::IndexError;
use crate::model::{interpret_string, iso_check, EdgeId, Graph, GraphSymbol, Interpreter, ModelError, NodeId};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecognizeError {
    #[error("automaton lacks selection certificates; use backtracking mode or force the run")]
    UncertifiedDfa,
    #[error("search budget of {steps} steps exhausted")]
    BudgetExhausted { steps: u64 },
    #[error("run invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub witness: bool,
    pub trace: bool,
    /// Check configuration invariants after each step and rescan the index
    /// every 1000 events.
    pub check_invariants: bool,
    /// Step limit for backtracking.
    pub budget: u64,
    /// Run the linear recognizer on an automaton without certificates.
    pub allow_uncertified: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            witness: true,
            trace: false,
            check_invariants: cfg!(debug_assertions),
            budget: DEFAULT_BUDGET,
            allow_uncertified: false,
        }
    }
}

impl RunOptions {
    /// No witness, trace, or checks.
    pub fn quiet() -> Self {
        Self {
            witness: false,
            trace: false,
            check_invariants: false,
            ..Self::default()
        }
    }
}

/// Symbols of an accepting run with the edge each atom consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub front_arity: usize,
    pub steps: Vec<(GraphSymbol, Option<EdgeId>)>,
}

impl Witness {
    pub fn symbols(&self) -> Vec<GraphSymbol> {
        self.steps.iter().map(|(s, _)| s.clone()).collect()
    }

    /// Interpretation of the symbol string; the empty string denotes the
    /// discrete graph on the front.
    pub fn interpret(&self) -> Result<Graph, ModelError> {
        if self.steps.is_empty() {
            return Ok(Interpreter::with_front(self.front_arity).finish());
        }
        interpret_string(&self.symbols())
    }

    /// Whether the witness denotes a graph isomorphic to `g`.
    pub fn replays_to(&self, g: &Graph) -> Result<bool, ModelError> {
        iso_check(&self.interpret()?, g)
    }

    /// Checks the same property in linear time using the edge recorded for
    /// each atom: the node map induced by the attachments and the interfaces
    /// must be a bijection, and each recorded edge must appear exactly once
    /// with its symbol's label.
    pub fn certifies(&self, g: &Graph) -> Result<bool, ModelError> {
        let h = self.interpret()?;
        let edges: Vec<EdgeId> = self
            .steps
            .iter()
            .filter(|(s, _)| s.as_atom().is_some())
            .map(|&(_, e)| e)
            .collect::<Option<_>>()
            .unwrap_or_default();
        if h.node_count() != g.node_count()
            || h.edge_count() != g.edge_count()
            || edges.len() != h.edge_count()
            || h.front().len() != g.front().len()
            || h.rear().len() != g.rear().len()
        {
            return Ok(false);
        }
        let mut map: Vec<Option<NodeId>> = vec![None; h.node_count()];
        let mut bind = |x: NodeId, y: NodeId| match map[x as usize] {
            Some(m) => m == y,
            None => {
                map[x as usize] = Some(y);
                true
            }
        };
        let mut seen = vec![false; g.edge_count()];
        for (i, &e) in edges.iter().enumerate() {
            if (e as usize) >= g.edge_count() || std::mem::replace(&mut seen[e as usize], true) {
                return Ok(false);
            }
            let (hl, ha) = (h.edge_label(i as EdgeId), h.attachment(i as EdgeId));
            if hl != g.edge_label(e) || ha.len() != g.attachment(e).len() {
                return Ok(false);
            }
            if !ha.iter().zip(g.attachment(e)).all(|(&x, &y)| bind(x, y)) {
                return Ok(false);
            }
        }
        let interfaces = [(h.front(), g.front()), (h.rear(), g.rear())];
        if !interfaces
            .iter()
            .all(|(hs, gs)| hs.iter().zip(gs.iter()).all(|(&x, &y)| bind(x, y)))
        {
            return Ok(false);
        }
        // Every node of `h` lies on an edge or an interface, so the map is
        // total; equal node counts make an injective map a bijection.
        let mut hit = vec![false; g.node_count()];
        for m in &map {
            match m {
                Some(y) if !std::mem::replace(&mut hit[*y as usize], true) => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, _)) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// One executed step: the transition taken from `source`, the consumed edge,
/// and the front afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub source: StateId,
    pub transition: usize,
    pub edge: Option<EdgeId>,
    pub front: Vec<NodeId>,
}

pub fn render_trace(a: &TypedAutomaton, g: &Graph, trace: &[TraceStep]) -> String {
    let mut out = String::new();
    for (k, s) in trace.iter().enumerate() {
        let t = a.transition(s.transition);
        let edge = s.edge.map_or_else(|| "-".to_string(), |e| format!("e{e}"));
        let front: Vec<String> = s.front.iter().map(|&v| g.node_name(v)).collect();
        out.push_str(&format!(
            "step {}: {}, {}, {}, F=[{}]\n",
            k + 1,
            a.state(s.source).name,
            t.symbol,
            edge,
            front.join(",")
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recognition {
    pub accepted: bool,
    pub witness: Option<Witness>,
    pub trace: Vec<TraceStep>,
    /// Steps applied, including undone ones for backtracking.
    pub steps: u64,
}

impl Recognition {
    fn reject(steps: u64) -> Self {
        Self {
            accepted: false,
            witness: None,
            trace: Vec::new(),
            steps,
        }
    }
}

/// Necessary conditions checked before any search: the front matches the
/// start rank and every isolated node lies in the front.
pub(crate) fn precheck(a: &TypedAutomaton, g: &Graph) -> bool {
    if g.front().len() != a.state(a.start()).rank {
        return false;
    }
    g.discrete_nodes().iter().all(|v| g.front().contains(v))
}

pub(crate) fn witness_from(a: &TypedAutomaton, g: &Graph, path: &[(usize, Option<EdgeId>)]) -> Witness {
    Witness {
        front_arity: g.front().len(),
        steps: path
            .iter()
            .map(|&(t, e)| (a.transition(t).symbol.clone(), e))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse_automaton_spec, parse_graph};

    #[test]
    fn trace_rendering() {
        let a = parse_automaton_spec(include_str!("../../langs/abc.auto")).unwrap();
        let g = parse_graph(include_str!("../../langs/S.json"), None).unwrap();
        let t = vec![TraceStep {
            source: 0,
            transition: 0,
            edge: Some(0),
            front: vec![1, 3],
        }];
        assert_eq!(render_trace(&a, &g, &t), "step 1: q0, a^13_23, e0, F=[2,4]\n");
    }

    #[test]
    fn empty_witness_is_discrete_front() {
        let w = Witness {
            front_arity: 2,
            steps: vec![],
        };
        let g = w.interpret().unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 0));
        assert_eq!(w.to_string(), "");
    }
}
