mod common;

use proptest::prelude::*;

use common::moore_state_count;
use regraph::automaton::TypedAutomaton;
use regraph::langs::Language;
use regraph::model::Vocabulary;
use regraph::pipeline::{compile, minimize, powerset};
use regraph::regex::compile_regex_file;

#[test]
fn minimizer_matches_moore_on_shipped_languages() {
    for lang in Language::ALL {
        let c = compile(&compile_regex_file(lang.regex()).unwrap()).unwrap();
        let oracle = moore_state_count(&c.deterministic);
        assert_eq!(c.minimized.state_count(), oracle, "{lang}");
        assert_eq!(moore_state_count(&c.minimized), oracle, "{lang}");
    }
}

const SYMBOLS: [&str; 3] = ["a^1_1", "b^1_1", "c^1_1"];

/// Random complete-or-partial deterministic automaton over three rank-1
/// symbols, every state of rank 1.
fn random_dfa(states: usize, table: &[Option<usize>], finals: &[bool]) -> TypedAutomaton {
    let vocab = Vocabulary::from_pairs([("a", 1), ("b", 1), ("c", 1)]).unwrap();
    let mut a = TypedAutomaton::new(vocab.clone());
    for q in 0..states {
        a.add_state(&format!("s{q}"), 1, finals[q]).unwrap();
    }
    a.set_start(0);
    for q in 0..states {
        for (k, sym) in SYMBOLS.iter().enumerate() {
            if let Some(r) = table[q * SYMBOLS.len() + k] {
                let s = regraph::formats::parse_symbol(sym, &vocab).unwrap();
                a.add_transition(q as u32, s, (r % states) as u32).unwrap();
            }
        }
    }
    a
}

proptest! {
    #[test]
    fn minimizer_matches_moore_on_random_dfas(
        (states, table, finals) in (1usize..8).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec(prop::option::weighted(0.8, 0usize..8), n * SYMBOLS.len()),
            prop::collection::vec(any::<bool>(), n),
        ))
    ) {
        let a = random_dfa(states, &table, &finals);
        let m = minimize(&a);
        prop_assert_eq!(m.state_count(), moore_state_count(&a));
        let mut got = m.accepted_words(5, 10_000);
        let mut want = a.trim().accepted_words(5, 10_000);
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
        let d = powerset(&a).unwrap();
        prop_assert_eq!(minimize(&d).state_count(), m.state_count());
    }
}
