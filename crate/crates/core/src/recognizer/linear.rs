use std::borrow::Cow;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::automaton::{Dfa, StateId};
use crate::index::{locality_sorted, signatures, EdgeIndex, SimpleIndex};
use crate::model::{EdgeId, Graph, GraphSymbol, NodeId};

use super::step::{AtomPattern, RunConfig};
use super::{precheck, witness_from, Recognition, RecognizeError, RunOptions, TraceStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMode {
    Simple,
    Efficient,
}

impl FromStr for IndexMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simple" => Ok(IndexMode::Simple),
            "efficient" => Ok(IndexMode::Efficient),
            other => Err(format!("unknown index mode `{other}`")),
        }
    }
}

impl std::fmt::Display for IndexMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IndexMode::Simple => "simple",
            IndexMode::Efficient => "efficient",
        })
    }
}

enum Index {
    Simple(SimpleIndex),
    Efficient(EdgeIndex),
}

/// A linear recognition run with its index built and ready to execute.
pub struct LinearRun<'a> {
    dfa: &'a Dfa,
    g: Cow<'a, Graph>,
    /// Original id of each edge of `g` when the edges were reordered.
    original: Option<Vec<EdgeId>>,
    index: Index,
    /// Pattern and signature id per transition; `None` for blanks.
    patterns: Vec<Option<(AtomPattern, usize)>>,
    signature_count: usize,
    pub build_time: Duration,
}

impl<'a> LinearRun<'a> {
    pub fn prepare(dfa: &'a Dfa, g: &'a Graph, mode: IndexMode, opts: &RunOptions) -> Result<Self, RecognizeError> {
        if !dfa.is_certified() && !opts.allow_uncertified {
            return Err(RecognizeError::UncertifiedDfa);
        }
        let clock = Instant::now();
        let (g, original) = match mode {
            IndexMode::Simple => (Cow::Borrowed(g), None),
            IndexMode::Efficient => {
                let (sorted, original) = locality_sorted(g);
                (Cow::Owned(sorted), Some(original))
            }
        };
        let sigs = signatures(dfa);
        let patterns = dfa
            .automaton()
            .transitions()
            .iter()
            .map(|t| {
                t.symbol.as_atom().map(|atom| {
                    let bound: Vec<usize> = atom.bound_positions().iter().map(|&(p, _)| p).collect();
                    let sig = sigs
                        .iter()
                        .position(|s| s.label == atom.label() && s.bound == bound)
                        .expect("signature of every atom");
                    (AtomPattern::new(atom, &g), sig)
                })
            })
            .collect();
        let index = match mode {
            IndexMode::Simple => Index::Simple(SimpleIndex::build(&g)),
            IndexMode::Efficient => {
                let mut enc = vec![false; g.node_count()];
                for &v in g.front() {
                    enc[v as usize] = true;
                }
                Index::Efficient(EdgeIndex::build(&sigs, &g, &enc))
            }
        };
        Ok(Self {
            dfa,
            g,
            original,
            index,
            patterns,
            signature_count: sigs.len(),
            build_time: clock.elapsed(),
        })
    }

    /// Greedy run: at each step take the first transition in trial order that
    /// has a candidate edge, then decide acceptance once every edge is read.
    pub fn run(mut self, opts: &RunOptions) -> Result<Recognition, RecognizeError> {
        let a = self.dfa.automaton();
        let g: &Graph = &self.g;
        let original = self.original.as_deref();
        let orig = |e: EdgeId| original.map_or(e, |o| o[e as usize]);
        if !precheck(a, g) {
            return Ok(Recognition::reject(0));
        }
        let mut cfg = RunConfig::initial(a.start(), g);
        let mut left = vec![false; if opts.check_invariants { g.node_count() } else { 0 }];
        let mut unread = g.edge_count();
        let mut scratch: Vec<NodeId> = Vec::new();
        let mut key: Vec<NodeId> = Vec::new();
        let mut pairs: Vec<(usize, NodeId)> = Vec::new();
        let mut path: Vec<(usize, Option<EdgeId>)> = Vec::new();
        let mut trace: Vec<TraceStep> = Vec::new();
        let mut steps = 0u64;
        let mut events = 0usize;

        while unread > 0 {
            let q = cfg.state as usize;
            let mut chosen = None;
            for &t in &self.dfa.order()[q] {
                let (p, sig) = self.patterns[t].as_ref().expect("ordered transitions are atoms");
                let found = match &self.index {
                    Index::Efficient(ix) => {
                        key.clear();
                        key.extend(p.bound.iter().map(|&(_, s)| cfg.front[s]));
                        ix.lookup(*sig, &key)?
                    }
                    Index::Simple(ix) => {
                        pairs.clear();
                        pairs.extend(p.bound.iter().map(|&(pos, s)| (pos, cfg.front[s])));
                        ix.lookup(g, p.label, &pairs, &cfg.encountered)
                    }
                };
                if let Some(e) = found {
                    chosen = Some((t, e));
                    break;
                }
            }
            let Some((t, e)) = chosen else {
                return Ok(Recognition {
                    trace,
                    ..Recognition::reject(steps)
                });
            };

            let (p, _) = self.patterns[t].as_ref().expect("atom");
            debug_assert!(p.matches(g, e, &cfg.front, &cfg.encountered));
            p.next_front(g, e, &cfg.front, &mut scratch);
            std::mem::swap(&mut cfg.front, &mut scratch);
            cfg.unread[e as usize] = false;
            unread -= 1;
            match &mut self.index {
                Index::Efficient(ix) => {
                    ix.on_read(g, e)?;
                    for &v in g.attachment(e) {
                        if !cfg.encountered[v as usize] {
                            cfg.encountered[v as usize] = true;
                            ix.on_encounter(g, v)?;
                            events += 1;
                        }
                    }
                }
                Index::Simple(ix) => {
                    ix.on_read(g, e)?;
                    for &v in g.attachment(e) {
                        cfg.encountered[v as usize] = true;
                    }
                }
            }
            events += 1;
            cfg.state = a.transition(t).target;
            steps += 1;

            if opts.check_invariants {
                cfg.check(a).map_err(RecognizeError::Invariant)?;
                for &v in &scratch {
                    if !cfg.front.contains(&v) {
                        left[v as usize] = true;
                    }
                }
                if let Some(&v) = cfg.front.iter().find(|&&v| left[v as usize]) {
                    return Err(RecognizeError::Invariant(format!("node {v} re-entered the front")));
                }
                if let Index::Efficient(ix) = &self.index {
                    if events >= 1000 {
                        events = 0;
                        ix.validate(g).map_err(RecognizeError::Invariant)?;
                    }
                }
            }
            if opts.witness {
                path.push((t, Some(orig(e))));
            }
            if opts.trace {
                trace.push(TraceStep {
                    source: a.transition(t).source,
                    transition: t,
                    edge: Some(orig(e)),
                    front: cfg.front.clone(),
                });
            }
        }

        if opts.check_invariants {
            if let Index::Efficient(ix) = &self.index {
                ix.validate(g).map_err(RecognizeError::Invariant)?;
                let bound = g.edge_count() * self.signature_count;
                if ix.unlinks() > bound {
                    return Err(RecognizeError::Invariant(format!(
                        "{} unlinks exceed {bound}",
                        ix.unlinks()
                    )));
                }
            }
        }

        let q = cfg.state;
        let mut accepted = a.state(q).is_final && cfg.front == g.rear();
        if !accepted {
            if let Some((t, front)) = final_blank(self.dfa, q, &cfg.front, g.rear()) {
                accepted = true;
                if opts.witness {
                    path.push((t, None));
                }
                if opts.trace {
                    trace.push(TraceStep {
                        source: q,
                        transition: t,
                        edge: None,
                        front,
                    });
                }
            }
        }
        Ok(Recognition {
            accepted,
            witness: (accepted && opts.witness).then(|| witness_from(a, g, &path)),
            trace,
            steps,
        })
    }
}

/// An outgoing blank transition into a final state that maps `front` to `rear`.
fn final_blank(dfa: &Dfa, q: StateId, front: &[NodeId], rear: &[NodeId]) -> Option<(usize, Vec<NodeId>)> {
    let a = dfa.automaton();
    a.transitions().iter().enumerate().find_map(|(i, t)| {
        let GraphSymbol::Blank(b) = &t.symbol else { return None };
        if t.source != q || !a.state(t.target).is_final {
            return None;
        }
        let next: Vec<NodeId> = b.rear().iter().map(|&r| front[r - 1]).collect();
        (next == rear).then_some((i, next))
    })
}

/// Builds the index and runs the greedy recognizer.
pub fn recognize_linear(dfa: &Dfa, g: &Graph, mode: IndexMode, opts: &RunOptions) -> Result<Recognition, RecognizeError> {
    LinearRun::prepare(dfa, g, mode, opts)?.run(opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_graph;
    use crate::pipeline::compile;
    use crate::regex::compile_regex_file;

    fn dfa(text: &str) -> Dfa {
        compile(&compile_regex_file(text).unwrap()).unwrap().dfa
    }

    fn smt() -> Graph {
        let s = parse_graph(include_str!("../../langs/S.json"), None).unwrap();
        let m = parse_graph(include_str!("../../langs/M.json"), None).unwrap();
        let t = parse_graph(include_str!("../../langs/T.json"), None).unwrap();
        s.concat(&m).unwrap().concat(&t).unwrap()
    }

    #[test]
    fn abc_accepts_in_both_modes() {
        let d = dfa(include_str!("../../langs/abc.regex"));
        let g = smt();
        for mode in [IndexMode::Simple, IndexMode::Efficient] {
            let opts = RunOptions {
                trace: true,
                check_invariants: true,
                ..RunOptions::default()
            };
            let r = recognize_linear(&d, &g, mode, &opts).unwrap();
            assert!(r.accepted, "{mode}");
            assert_eq!(r.steps, 9);
            assert_eq!(r.trace.len(), 9);
            let w = r.witness.unwrap();
            assert!(w.replays_to(&g).unwrap());
            assert!(w.certifies(&g).unwrap());
            let mut swapped = w.clone();
            swapped.steps.swap(0, 1);
            assert!(!swapped.certifies(&g).unwrap_or(false));
            let mut reused = w.clone();
            reused.steps[1].1 = reused.steps[0].1;
            assert!(!reused.certifies(&g).unwrap());
        }
    }

    #[test]
    fn uncertified_is_refused_unless_forced() {
        let d = dfa(include_str!("../../langs/wheels.regex"));
        let g = Graph::new();
        assert!(matches!(
            recognize_linear(&d, &g, IndexMode::Efficient, &RunOptions::default()),
            Err(RecognizeError::UncertifiedDfa)
        ));
        let forced = RunOptions {
            allow_uncertified: true,
            ..RunOptions::default()
        };
        assert!(!recognize_linear(&d, &g, IndexMode::Efficient, &forced).unwrap().accepted);
    }

    #[test]
    fn palindrome_ab_is_rejected() {
        let d = dfa(include_str!("../../langs/palindromes.regex"));
        let g = parse_graph(
            r#"{"nodes":[1,2,3], "edges":[{"label":"a","att":[1,2]},{"label":"b","att":[2,3]}], "front":[1,3], "rear":[]}"#,
            None,
        )
        .unwrap();
        for mode in [IndexMode::Simple, IndexMode::Efficient] {
            assert!(!recognize_linear(&d, &g, mode, &RunOptions::default()).unwrap().accepted);
        }
    }

    #[test]
    fn mode_names_parse() {
        assert_eq!("simple".parse::<IndexMode>(), Ok(IndexMode::Simple));
        assert!("fast".parse::<IndexMode>().is_err());
    }
}
