//! Line-oriented automaton specification.
//!
//! ```text
//! symbol a(2), b(2), c(2)
//! state q0(2), q1(2), *q2(0)
//! start q0
//! q0 -> q1 : a^13_23
//! ```

use std::fmt::Write as _;

use super::lexer::Cursor;
use super::FormatError;
use crate::automaton::TypedAutomaton;
use crate::model::Vocabulary;

enum LineKind {
    Symbol,
    State,
    Start,
    Transition,
}

fn classify(rest: &str) -> LineKind {
    let keyword = |k: &str| {
        rest.strip_prefix(k)
            .is_some_and(|r| r.starts_with(|c: char| c.is_whitespace()))
    };
    if keyword("symbol") {
        LineKind::Symbol
    } else if keyword("state") {
        LineKind::State
    } else if keyword("start") {
        LineKind::Start
    } else {
        LineKind::Transition
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim_start();
        (!t.is_empty() && !t.starts_with('#')).then_some((i + 1, l))
    })
}

/// Reads `symbol` header lines into a vocabulary. Returns the vocabulary and
/// the lines that are not symbol declarations.
pub(crate) fn parse_symbol_header(text: &str) -> Result<(Vocabulary, Vec<(usize, &str)>), FormatError> {
    let mut vocab = Vocabulary::new();
    let mut rest = Vec::new();
    for (line, l) in content_lines(text) {
        if let LineKind::Symbol = classify(l.trim_start()) {
            let mut c = Cursor::at(l, line, 1);
            c.skip_inline_ws();
            c.eat_str("symbol");
            for d in c.decl_list()? {
                if d.marked {
                    return Err(FormatError::Syntax {
                        line: d.line,
                        column: d.column,
                        message: "`*` is only allowed on states".into(),
                    });
                }
                vocab.declare(d.name, d.rank).map_err(|e| FormatError::Semantic {
                    line: d.line,
                    column: d.column,
                    message: e.to_string(),
                })?;
            }
            c.expect_line_end()?;
        } else {
            rest.push((line, l));
        }
    }
    Ok((vocab, rest))
}

pub fn parse_automaton_spec(text: &str) -> Result<TypedAutomaton, FormatError> {
    let (vocab, lines) = parse_symbol_header(text)?;
    let mut a = TypedAutomaton::new(vocab);
    let mut start: Option<(String, usize, usize)> = None;
    let mut transitions = Vec::new();
    for (line, l) in lines {
        let mut c = Cursor::at(l, line, 1);
        c.skip_inline_ws();
        match classify(c.rest()) {
            LineKind::State => {
                c.eat_str("state");
                for d in c.decl_list()? {
                    a.add_state(d.name, d.rank, d.marked).map_err(|e| FormatError::Semantic {
                        line: d.line,
                        column: d.column,
                        message: e.to_string(),
                    })?;
                }
                c.expect_line_end()?;
            }
            LineKind::Start => {
                c.eat_str("start");
                c.skip_inline_ws();
                let (sl, sc) = c.position();
                let name = c.ident()?;
                c.expect_line_end()?;
                if start.is_some() {
                    return Err(FormatError::Semantic {
                        line: sl,
                        column: sc,
                        message: "start state declared twice".into(),
                    });
                }
                start = Some((name.to_string(), sl, sc));
            }
            LineKind::Transition => transitions.push(c),
            LineKind::Symbol => unreachable!("symbol lines are consumed by the header pass"),
        }
    }
    let (name, sl, sc) = start.ok_or_else(|| FormatError::Semantic {
        line: 1,
        column: 1,
        message: "missing `start` declaration".into(),
    })?;
    let q0 = a.state_by_name(&name).ok_or_else(|| FormatError::Semantic {
        line: sl,
        column: sc,
        message: format!("undeclared state `{name}`"),
    })?;
    a.set_start(q0);
    for mut c in transitions {
        let (p, q, sym, (line, column)) = {
            let resolve = |c: &mut Cursor, a: &TypedAutomaton| {
                let (line, column) = c.position();
                let name = c.ident()?;
                a.state_by_name(name).ok_or_else(|| FormatError::Semantic {
                    line,
                    column,
                    message: format!("undeclared state `{name}`"),
                })
            };
            let pos = c.position();
            let p = resolve(&mut c, &a)?;
            c.skip_inline_ws();
            if !c.eat_str("->") {
                return Err(c.error(format!("expected `->`, found {}", c.describe())));
            }
            c.skip_inline_ws();
            let q = resolve(&mut c, &a)?;
            c.skip_inline_ws();
            c.expect(':')?;
            c.skip_inline_ws();
            let sym = c.symbol(a.vocab())?;
            c.expect_line_end()?;
            (p, q, sym, pos)
        };
        a.add_transition(p, sym, q).map_err(|e| FormatError::Semantic {
            line,
            column,
            message: e.to_string(),
        })?;
    }
    Ok(a)
}

pub(crate) fn write_symbol_header(out: &mut String, vocab: &Vocabulary) {
    if vocab.is_empty() {
        return;
    }
    let decls: Vec<String> = vocab.iter().map(|(l, r)| format!("{l}({r})")).collect();
    let _ = writeln!(out, "symbol {}", decls.join(", "));
}

pub fn write_automaton_spec(a: &TypedAutomaton) -> String {
    let mut out = String::new();
    write_symbol_header(&mut out, a.vocab());
    if a.state_count() > 0 {
        let states: Vec<String> = a
            .states()
            .iter()
            .map(|s| format!("{}{}({})", if s.is_final { "*" } else { "" }, s.name, s.rank))
            .collect();
        let _ = writeln!(out, "state {}", states.join(", "));
        let _ = writeln!(out, "start {}", a.state(a.start()).name);
    }
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "{} -> {} : {}",
            a.state(t.source).name,
            a.state(t.target).name,
            t.symbol
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABC: &str = "\
# a^n b^n c^n
symbol a(2), b(2), c(2)
state q0(2), q1(2), q2(3), q3(1), q4(3), *q5(0), q6(3)
start q0
q0 -> q1 : a^13_23
q1 -> q2 : b^32_312
q1 -> q3 : b^12_2
q2 -> q4 : c^341_342
q4 -> q6 : a^134_234
q6 -> q2 : b^324_314
q6 -> q3 : b^123_3
q3 -> q5 : c^1_<>
";

    #[test]
    fn reads_and_writes_round_trip() {
        let a = parse_automaton_spec(ABC).unwrap();
        assert_eq!(a.state_count(), 7);
        assert_eq!(a.transitions().len(), 8);
        assert_eq!(a.finals(), vec![5]);
        let again = parse_automaton_spec(&write_automaton_spec(&a)).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn rank_mismatch_reports_line() {
        let text = "symbol a(2)\nstate q0(2), *q1(3)\nstart q0\nq0 -> q1 : a^13_23\n";
        match parse_automaton_spec(text) {
            Err(FormatError::Semantic { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors() {
        let bad = [
            ("symbol a(2\n", 1),
            ("symbol a(2)\nstate q0(2)\nstart q0\nq0 => q0 : a^12_12\n", 4),
            ("symbol a(2)\nstate q0(2)\nstart q0\nq0 -> q0 : a^12_12 junk\n", 4),
        ];
        for (text, line) in bad {
            match parse_automaton_spec(text) {
                Err(FormatError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_automaton_spec("symbol a(2)\nstate q0(2)\n"),
            Err(FormatError::Semantic { .. })
        ));
        assert!(matches!(
            parse_automaton_spec("symbol a(2)\nstate q0(2)\nstart q9\n"),
            Err(FormatError::Semantic { line: 3, .. })
        ));
    }
}
