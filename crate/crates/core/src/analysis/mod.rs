//! Static checks that decide whether greedy, backtracking-free recognition
//! is exact for a deterministic automaton.
//!
//! The transition-selection check orders each state's atom transitions so
//! that a transition whose match may be a stray is tried after the
//! transitions the run may need. The free-edge-choice check requires every
//! deferrable transition (one that can stray against itself) to keep its
//! rear within its front, so the chosen edge cannot influence the next front.

mod stray;

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fmt::Write as _;

pub use stray::{mark_state_bound, propagate_marks, strayable, MarkState};

use crate::automaton::{Dfa, StateId, TypedAutomaton};
use crate::formats::automaton_digest;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("report was computed for a different automaton")]
    ReportMismatch,
}

/// `before` must be tried before `after` at `state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precedence {
    pub state: StateId,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsFailure {
    pub state: StateId,
    /// Transitions forming a precedence cycle, each preceding the next.
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsReport {
    pub digest: String,
    pub constraints: Vec<Precedence>,
    /// Atom transitions of each state in trial order.
    pub orders: Vec<Vec<usize>>,
    pub failure: Option<TsFailure>,
}

impl TsReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn render(&self, a: &TypedAutomaton) -> String {
        let mut out = String::new();
        match &self.failure {
            None => {
                let _ = writeln!(out, "TS check passed ({} precedence constraints)", self.constraints.len());
            }
            Some(f) => {
                let _ = writeln!(out, "TS check failed at state {}: precedence cycle", a.state(f.state).name);
                for t in &f.cycle {
                    let tr = a.transition(*t);
                    let _ = writeln!(out, "  [{t}] {} -> {} : {}", a.state(tr.source).name, a.state(tr.target).name, tr.symbol);
                }
            }
        }
        for c in &self.constraints {
            let _ = writeln!(
                out,
                "  at {}: {} before {}",
                a.state(c.state).name,
                a.transition(c.before).symbol,
                a.transition(c.after).symbol
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FecReport {
    pub digest: String,
    pub deferrable: Vec<usize>,
    /// Deferrable transitions whose rear has a node outside the front.
    pub failing: Vec<usize>,
}

impl FecReport {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }

    pub fn render(&self, a: &TypedAutomaton) -> String {
        let mut out = String::new();
        let verdict = if self.passed() { "passed" } else { "failed" };
        let _ = writeln!(out, "FEC check {verdict} ({} deferrable transitions)", self.deferrable.len());
        for &t in &self.deferrable {
            let tr = a.transition(t);
            let atom = tr.symbol.as_atom().expect("atom");
            let mark = if self.failing.contains(&t) { "FAIL" } else { "ok" };
            let _ = writeln!(
                out,
                "  {mark} [{t}] {} -> {} : {} (front {:?}, rear {:?})",
                a.state(tr.source).name,
                a.state(tr.target).name,
                tr.symbol,
                atom.front(),
                atom.rear()
            );
        }
        out
    }
}

/// Pairs of distinct atom transitions of one state that match exactly the
/// same edges: same label and same position-to-slot bindings.
fn identical_patterns(a: &TypedAutomaton, ts: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &x) in ts.iter().enumerate() {
        for &y in &ts[i + 1..] {
            let (p, q) = (a.transition(x).symbol.as_atom(), a.transition(y).symbol.as_atom());
            if let (Some(p), Some(q)) = (p, q) {
                if p.label() == q.label() && p.bound_positions() == q.bound_positions() {
                    out.push((x, y));
                }
            }
        }
    }
    out
}

pub fn ts_check(dfa: &Dfa) -> TsReport {
    let a = dfa.automaton();
    let succ = stray::atom_successors(a);
    let mut constraints = Vec::new();
    let mut orders = Vec::with_capacity(a.state_count());
    let mut failure = None;
    for q in 0..a.state_count() {
        let ts: Vec<usize> = succ[q].iter().map(|&(i, _, _)| i).collect();
        let mut local = Vec::new();
        for &t1 in &ts {
            for &t2 in &ts {
                if t1 != t2 && stray::strayable_with(a, &succ, t1, t2) {
                    local.push((t2, t1));
                }
            }
        }
        for (x, y) in identical_patterns(a, &ts) {
            for pair in [(x, y), (y, x)] {
                if !local.contains(&pair) {
                    local.push(pair);
                }
            }
        }
        match topo_order(&ts, &local) {
            Ok(order) => orders.push(order),
            Err(cycle) => {
                if failure.is_none() {
                    failure = Some(TsFailure {
                        state: q as StateId,
                        cycle,
                    });
                }
                orders.push(ts.clone());
            }
        }
        constraints.extend(local.into_iter().map(|(before, after)| Precedence {
            state: q as StateId,
            before,
            after,
        }));
    }
    TsReport {
        digest: automaton_digest(a),
        constraints,
        orders,
        failure,
    }
}

/// Kahn's algorithm, breaking ties by position in `nodes`. On failure returns
/// a cycle.
fn topo_order(nodes: &[usize], edges: &[(usize, usize)]) -> Result<Vec<usize>, Vec<usize>> {
    let idx = |t: usize| nodes.iter().position(|&x| x == t).expect("local transition");
    let n = nodes.len();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for &(b, a) in edges {
        let (b, a) = (idx(b), idx(a));
        succ[b].push(a);
        pred[a].push(b);
        indeg[a] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    while let Some(Reverse(i)) = heap.pop() {
        done[i] = true;
        order.push(nodes[i]);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                heap.push(Reverse(j));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every remaining node has a remaining predecessor; walk back until a repeat.
    let mut walk = vec![(0..n).find(|&i| !done[i]).expect("remaining node")];
    loop {
        let cur = *walk.last().expect("non-empty");
        let p = *pred[cur].iter().find(|&&p| !done[p]).expect("remaining predecessor");
        if let Some(pos) = walk.iter().position(|&x| x == p) {
            let mut cycle: Vec<usize> = walk[pos..].iter().map(|&i| nodes[i]).collect();
            cycle.reverse();
            return Err(cycle);
        }
        walk.push(p);
    }
}

pub fn fec_check(dfa: &Dfa) -> FecReport {
    let a = dfa.automaton();
    let succ = stray::atom_successors(a);
    let mut deferrable = Vec::new();
    let mut failing = Vec::new();
    for (t, tr) in a.transitions().iter().enumerate() {
        let Some(atom) = tr.symbol.as_atom() else { continue };
        if stray::strayable_with(a, &succ, t, t) {
            deferrable.push(t);
            if !atom.rear().iter().all(|r| atom.front().contains(r)) {
                failing.push(t);
            }
        }
    }
    FecReport {
        digest: automaton_digest(a),
        deferrable,
        failing,
    }
}

/// Installs the trial order from `ts` and records both certificates.
pub fn reorder_transitions(dfa: &Dfa, ts: &TsReport, fec: &FecReport) -> Result<Dfa, AnalysisError> {
    let digest = automaton_digest(dfa.automaton());
    if ts.digest != digest || fec.digest != digest {
        return Err(AnalysisError::ReportMismatch);
    }
    let mut out = dfa.clone();
    out.set_order(ts.orders.clone());
    out.set_deferrable(fec.deferrable.clone());
    out.flags.ts_certified = ts.passed();
    out.flags.fec_certified = fec.passed();
    Ok(out)
}

/// Runs both checks and installs their results.
pub fn certify(dfa: &Dfa) -> (Dfa, TsReport, FecReport) {
    let ts = ts_check(dfa);
    let fec = fec_check(dfa);
    let out = reorder_transitions(dfa, &ts, &fec).expect("reports match their own automaton");
    (out, ts, fec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::DfaFlags;
    use crate::formats::parse_automaton_spec;

    fn dfa(text: &str) -> Dfa {
        Dfa::new(parse_automaton_spec(text).unwrap(), DfaFlags::default())
    }

    const TWO_LOOPS: &str = "symbol a(2), b(2)\nstate *q(1)\nstart q\nq -> q : a^1_1\nq -> q : b^1_1\n";

    #[test]
    fn mutual_strays_fail_with_two_cycle() {
        let d = dfa(TWO_LOOPS);
        let r = ts_check(&d);
        let f = r.failure.expect("cycle");
        assert_eq!(f.state, 0);
        let mut c = f.cycle.clone();
        c.sort();
        assert_eq!(c, vec![0, 1]);
    }

    #[test]
    fn one_sided_constraint_orders_transitions() {
        // `b` strays while `a` is taken (the loop keeps the hub), not vice versa.
        let d = dfa(
            "symbol a(2), b(2), c(2)\n\
             state p(1), q(1), *f(0)\n\
             start p\n\
             p -> q : b^1_1\n\
             p -> p : a^1_1\n\
             q -> f : c^1_<>\n\
             p -> f : c^1_<>\n",
        );
        let r = ts_check(&d);
        assert!(r.passed(), "{}", r.render(d.automaton()));
        assert_eq!(r.orders[0], vec![1, 0, 3]);
        let pairs: Vec<(usize, usize)> = r.constraints.iter().map(|c| (c.before, c.after)).collect();
        assert_eq!(pairs, vec![(1, 0), (0, 3), (1, 3)]);
    }

    #[test]
    fn loose_spokes_pass_and_fail_fec() {
        let pass = dfa("symbol s(3)\nstate p(1), *q(1)\nstart p\np -> q : s^1_1\nq -> q : s^1_1\n");
        let r = fec_check(&pass);
        assert_eq!(r.deferrable, vec![0, 1]);
        assert!(r.passed());

        let fail = dfa("symbol s(3)\nstate p(2), *q(2)\nstart p\np -> q : s^12_12\nq -> q : s^14_13\n");
        let r = fec_check(&fail);
        assert_eq!(r.deferrable, vec![1]);
        assert_eq!(r.failing, vec![1]);
    }

    #[test]
    fn stale_report_is_rejected() {
        let d = dfa(TWO_LOOPS);
        let ts = ts_check(&d);
        let fec = fec_check(&d);
        let other = dfa("symbol a(2)\nstate *q(1)\nstart q\nq -> q : a^1_1\n");
        assert_eq!(reorder_transitions(&other, &ts, &fec), Err(AnalysisError::ReportMismatch));
        let ok = reorder_transitions(&d, &ts, &fec).unwrap();
        assert!(!ok.flags.ts_certified);
    }

    #[test]
    fn identical_patterns_conflict() {
        let d = dfa(
            "symbol a(2)\nstate p(3), *q(1)\nstart p\np -> q : a^134_3\np -> q : a^143_3\n",
        );
        assert!(!ts_check(&d).passed());
    }
}
