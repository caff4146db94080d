//! From a typed automaton to a minimized, checked DFA.

mod disambiguate;
mod minimize;
mod powerset;

use std::time::{Duration, Instant};

pub use disambiguate::{disambiguate, disambiguate_with, Disambiguated, DisambiguationLimits, Rewrite};
pub use minimize::minimize;
pub use powerset::{blanks_end_in_sinks, is_deterministic, powerset};

use crate::analysis::{fec_check, reorder_transitions, ts_check, FecReport, TsReport};
use crate::automaton::{Dfa, DfaFlags, TypedAutomaton};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("a reachable subset mixes states `{first}` and `{second}` of different ranks")]
    MixedRankSubset { first: String, second: String },
    #[error("atom symbols `{first}` and `{second}` agree on label and front but not on rear")]
    Ambiguous { first: String, second: String },
    #[error("disambiguation did not converge ({states} states)")]
    Diverged { states: usize },
}

/// Intermediate automata and check reports of one compilation.
#[derive(Debug, Clone)]
pub struct Compilation {
    pub input: TypedAutomaton,
    pub disambiguated: Disambiguated,
    pub deterministic: TypedAutomaton,
    pub minimized: TypedAutomaton,
    pub dfa: Dfa,
    pub ts: TsReport,
    pub fec: FecReport,
    pub timings: StageTimings,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub disambiguate: Duration,
    pub powerset: Duration,
    pub minimize: Duration,
    pub fec: Duration,
    pub ts: Duration,
}

impl Compilation {
    pub fn certified(&self) -> bool {
        self.dfa.is_certified()
    }
}

/// Disambiguation, subset construction, minimization, the FEC and TS checks,
/// and transition reordering.
pub fn compile(input: &TypedAutomaton) -> Result<Compilation, PipelineError> {
    let mut timings = StageTimings::default();
    let clock = Instant::now();
    let disambiguated = disambiguate(input)?;
    timings.disambiguate = clock.elapsed();

    let clock = Instant::now();
    let deterministic = powerset(&disambiguated.automaton)?;
    timings.powerset = clock.elapsed();

    let clock = Instant::now();
    let minimized = minimize(&deterministic);
    timings.minimize = clock.elapsed();

    let flags = DfaFlags {
        disambiguated: true,
        deterministic: true,
        minimized: true,
        ..DfaFlags::default()
    };
    let unchecked = Dfa::new(minimized.clone(), flags);

    let clock = Instant::now();
    let fec = fec_check(&unchecked);
    timings.fec = clock.elapsed();

    let clock = Instant::now();
    let ts = ts_check(&unchecked);
    timings.ts = clock.elapsed();

    let dfa = reorder_transitions(&unchecked, &ts, &fec).expect("reports match their own automaton");
    Ok(Compilation {
        input: input.clone(),
        disambiguated,
        deterministic,
        minimized,
        dfa,
        ts,
        fec,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::compile_regex_file;

    fn run(text: &str) -> Compilation {
        compile(&compile_regex_file(text).unwrap()).unwrap()
    }

    #[test]
    fn paper_languages() {
        let abc = run(include_str!("../../langs/abc.regex"));
        assert_eq!(abc.dfa.state_count(), 7);
        assert!(abc.certified());
        let spikes = run(include_str!("../../langs/spikes.regex"));
        assert_eq!(spikes.dfa.state_count(), 5);
        assert!(spikes.certified());
        let pal = run(include_str!("../../langs/palindromes.regex"));
        assert_eq!(pal.dfa.state_count(), 4);
        assert!(pal.certified());
        // The rim's start transition binds nothing and is deferrable.
        let wheels = run(include_str!("../../langs/wheels.regex"));
        assert!(wheels.ts.passed());
        assert_eq!(wheels.fec.failing, vec![0]);
        assert!(!wheels.certified());
    }

    #[test]
    fn hand_automaton_matches_regex() {
        let hand = crate::formats::parse_automaton_spec(include_str!("../../langs/abc.auto")).unwrap();
        let c = compile(&hand).unwrap();
        assert_eq!(c.dfa.state_count(), 7);
        let from_regex = run(include_str!("../../langs/abc.regex"));
        assert_eq!(
            c.minimized.accepted_words(12, 100),
            from_regex.minimized.accepted_words(12, 100)
        );
    }
}
