//! Regular expressions over graph symbols.
//!
//! Juxtaposition concatenates, `|` separates alternatives, `*` is the Kleene
//! star, and parentheses group. There is no empty expression.

use std::collections::BTreeSet;

use crate::automaton::{StateId, TypedAutomaton};
use crate::formats::lexer::Cursor;
use crate::formats::{parse_symbol_header, FormatError};
use crate::model::{GraphSymbol, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regex {
    Symbol(GraphSymbol),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegexError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{line}:{column}: empty expression")]
    EmptyExpression { line: usize, column: usize },
    #[error("concatenation of `{left}` (rear arity {rear}) with `{right}` (front arity {front})")]
    ChainMismatch {
        left: String,
        right: String,
        rear: usize,
        front: usize,
    },
    #[error("alternatives have different types {first:?} and {second:?}")]
    AltTypeMismatch {
        first: (usize, usize),
        second: (usize, usize),
    },
    #[error("starred expression `{expr}` has type {found:?}, which is not square")]
    StarNotSquare { expr: String, found: (usize, usize) },
    #[error("expression accepts only the empty word")]
    EpsilonLanguage,
}

impl std::fmt::Display for Regex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regex::Symbol(s) => write!(f, "{s}"),
            Regex::Concat(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match p {
                        Regex::Alt(_) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
            Regex::Alt(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Regex::Star(child) => match **child {
                Regex::Symbol(_) => write!(f, "{child}*"),
                _ => write!(f, "({child})*"),
            },
        }
    }
}

struct Parser<'a> {
    c: Cursor<'a>,
    vocab: &'a Vocabulary,
}

impl Parser<'_> {
    fn alt(&mut self) -> Result<Regex, RegexError> {
        let mut parts = vec![self.concat()?];
        loop {
            self.c.skip_trivia();
            if !self.c.eat('|') {
                break;
            }
            parts.push(self.concat()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Regex::Alt(parts) })
    }

    fn concat(&mut self) -> Result<Regex, RegexError> {
        let mut parts = Vec::new();
        loop {
            self.c.skip_trivia();
            match self.c.peek() {
                None | Some('|') | Some(')') => break,
                _ => parts.push(self.postfix()?),
            }
        }
        match parts.len() {
            0 => {
                let (line, column) = self.c.position();
                Err(RegexError::EmptyExpression { line, column })
            }
            1 => Ok(parts.pop().expect("one part")),
            _ => Ok(Regex::Concat(parts)),
        }
    }

    fn postfix(&mut self) -> Result<Regex, RegexError> {
        let mut r = self.primary()?;
        loop {
            self.c.skip_trivia();
            if !self.c.eat('*') {
                return Ok(r);
            }
            r = Regex::Star(Box::new(r));
        }
    }

    fn primary(&mut self) -> Result<Regex, RegexError> {
        if self.c.eat('(') {
            let r = self.alt()?;
            self.c.skip_trivia();
            self.c.expect(')')?;
            Ok(r)
        } else {
            Ok(Regex::Symbol(self.c.symbol(self.vocab)?))
        }
    }
}

/// Parses an expression body against a vocabulary.
pub fn parse_regex(text: &str, vocab: &Vocabulary) -> Result<Regex, RegexError> {
    parse_regex_at(Cursor::new(text), vocab)
}

fn parse_regex_at(c: Cursor<'_>, vocab: &Vocabulary) -> Result<Regex, RegexError> {
    let mut p = Parser { c, vocab };
    let r = p.alt()?;
    p.c.skip_trivia();
    if !p.c.at_end() {
        return Err(p.c.error(format!("unexpected {}", p.c.describe())).into());
    }
    Ok(r)
}

/// Parses a regex file: `symbol` header lines followed by the expression.
pub fn parse_regex_file(text: &str) -> Result<(Vocabulary, Regex), RegexError> {
    let (vocab, rest) = parse_symbol_header(text)?;
    // Re-join the non-header lines, keeping line numbers for error positions.
    let first = rest.first().map_or(1, |(l, _)| *l);
    let mut body = String::new();
    let mut line = first;
    for (l, t) in &rest {
        while line < *l {
            body.push('\n');
            line += 1;
        }
        body.push_str(t);
    }
    let r = parse_regex_at(Cursor::at(&body, first, 1), &vocab)?;
    Ok((vocab, r))
}

/// Computes the type `(front arity, rear arity)` of an expression.
pub fn typecheck(r: &Regex) -> Result<(usize, usize), RegexError> {
    match r {
        Regex::Symbol(s) => Ok(s.symbol_type()),
        Regex::Concat(parts) => {
            let mut ty = typecheck(&parts[0])?;
            for w in parts.windows(2) {
                let next = typecheck(&w[1])?;
                if ty.1 != next.0 {
                    return Err(RegexError::ChainMismatch {
                        left: w[0].to_string(),
                        right: w[1].to_string(),
                        rear: ty.1,
                        front: next.0,
                    });
                }
                ty = (ty.0, next.1);
            }
            Ok(ty)
        }
        Regex::Alt(parts) => {
            let first = typecheck(&parts[0])?;
            for p in &parts[1..] {
                let t = typecheck(p)?;
                if t != first {
                    return Err(RegexError::AltTypeMismatch { first, second: t });
                }
            }
            Ok(first)
        }
        Regex::Star(child) => {
            let t = typecheck(child)?;
            if t.0 != t.1 {
                return Err(RegexError::StarNotSquare {
                    expr: child.to_string(),
                    found: t,
                });
            }
            Ok(t)
        }
    }
}

/// Automaton with ε-moves used during construction.
struct Thompson {
    ranks: Vec<usize>,
    moves: Vec<(usize, Option<GraphSymbol>, usize)>,
}

impl Thompson {
    fn state(&mut self, rank: usize) -> usize {
        self.ranks.push(rank);
        self.ranks.len() - 1
    }

    /// Returns `(entry, exit)`.
    fn build(&mut self, r: &Regex) -> (usize, usize) {
        match r {
            Regex::Symbol(s) => {
                let (m, n) = s.symbol_type();
                let (a, b) = (self.state(m), self.state(n));
                self.moves.push((a, Some(s.clone()), b));
                (a, b)
            }
            Regex::Concat(parts) => {
                let (entry, mut exit) = self.build(&parts[0]);
                for p in &parts[1..] {
                    let (a, b) = self.build(p);
                    self.moves.push((exit, None, a));
                    exit = b;
                }
                (entry, exit)
            }
            Regex::Alt(parts) => {
                let frags: Vec<_> = parts.iter().map(|p| self.build(p)).collect();
                let (a, b) = (self.state(self.ranks[frags[0].0]), self.state(self.ranks[frags[0].1]));
                for (x, y) in frags {
                    self.moves.push((a, None, x));
                    self.moves.push((y, None, b));
                }
                (a, b)
            }
            Regex::Star(child) => {
                let (x, y) = self.build(child);
                let a = self.state(self.ranks[x]);
                let b = self.state(self.ranks[y]);
                self.moves.push((a, None, x));
                self.moves.push((y, None, b));
                self.moves.push((a, None, b));
                self.moves.push((y, None, x));
                (a, b)
            }
        }
    }

    fn closure(&self, eps: &[Vec<usize>], q: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for &r in &eps[p] {
                if seen.insert(r) {
                    stack.push(r);
                }
            }
        }
        seen
    }
}

/// Type-checks the expression and builds an ε-free automaton accepting the
/// same symbol strings. States are numbered in breadth-first order from the
/// start state and named `q0, q1, ...`.
pub fn regex_to_nfa(r: &Regex, vocab: &Vocabulary) -> Result<TypedAutomaton, RegexError> {
    typecheck(r)?;
    let mut t = Thompson {
        ranks: Vec::new(),
        moves: Vec::new(),
    };
    let (entry, exit) = t.build(r);
    let n = t.ranks.len();
    let mut eps = vec![Vec::new(); n];
    let mut sym = vec![Vec::new(); n];
    for (p, s, q) in &t.moves {
        match s {
            None => eps[*p].push(*q),
            Some(s) => sym[*p].push((s.clone(), *q)),
        }
    }

    // Only the entry and symbol targets survive elimination.
    let mut ids: Vec<Option<StateId>> = vec![None; n];
    let mut order = vec![entry];
    ids[entry] = Some(0);
    let mut out = TypedAutomaton::new(vocab.clone());
    let mut pending = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let p = order[i];
        i += 1;
        let cl = t.closure(&eps, p);
        let is_final = cl.contains(&exit);
        out.add_state(&format!("q{}", ids[p].expect("numbered")), t.ranks[p], is_final)
            .expect("fresh names");
        for &c in &cl {
            for (s, q) in &sym[c] {
                if ids[*q].is_none() {
                    ids[*q] = Some(order.len() as StateId);
                    order.push(*q);
                }
                pending.push((ids[p].expect("numbered"), s.clone(), ids[*q].expect("numbered")));
            }
        }
    }
    for (p, s, q) in pending {
        if !out
            .transitions()
            .iter()
            .any(|tr| tr.source == p && tr.target == q && tr.symbol == s)
        {
            out.add_transition(p, s, q).expect("ranks follow the construction");
        }
    }
    if out.transitions().is_empty() {
        return Err(RegexError::EpsilonLanguage);
    }
    Ok(out.trim())
}

/// Parses a regex file and translates it.
pub fn compile_regex_file(text: &str) -> Result<TypedAutomaton, RegexError> {
    let (vocab, r) = parse_regex_file(text)?;
    regex_to_nfa(&r, &vocab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_symbol;

    fn abc_vocab() -> Vocabulary {
        Vocabulary::from_pairs([("a", 2), ("b", 2), ("c", 2)]).unwrap()
    }

    const ABC: &str = "a^13_23 b^12_2 c^1_<> | a^13_23 b^32_312 c^341_342 (a^134_234 b^324_314 c^341_342)* a^134_234 b^123_3 c^1_<>";

    fn word(v: &Vocabulary, text: &str) -> Vec<GraphSymbol> {
        text.split_whitespace().map(|s| parse_symbol(s, v).unwrap()).collect()
    }

    #[test]
    fn abc_shape_and_type() {
        let v = abc_vocab();
        let r = parse_regex(ABC, &v).unwrap();
        match &r {
            Regex::Alt(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(&parts[1], Regex::Concat(xs) if xs.iter().any(|x| matches!(x, Regex::Star(_)))));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(typecheck(&r).unwrap(), (2, 0));
        assert_eq!(parse_regex(&r.to_string(), &v).unwrap(), r);
    }

    #[test]
    fn abc_nfa_accepts_sample_words() {
        let v = abc_vocab();
        let a = regex_to_nfa(&parse_regex(ABC, &v).unwrap(), &v).unwrap();
        assert!(a.accepts_word(&word(&v, "a^13_23 b^12_2 c^1_<>")));
        assert!(a.accepts_word(&word(&v, "a^13_23 b^32_312 c^341_342 a^134_234 b^123_3 c^1_<>")));
        assert!(!a.accepts_word(&word(&v, "a^13_23 b^12_2")));
        for t in a.transitions() {
            let (f, r) = t.symbol.symbol_type();
            assert_eq!(f, a.state(t.source).rank);
            assert_eq!(r, a.state(t.target).rank);
        }
    }

    #[test]
    fn single_symbol_nfa() {
        let v = abc_vocab();
        let a = regex_to_nfa(&parse_regex("a^13_23", &v).unwrap(), &v).unwrap();
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.states().iter().map(|s| s.rank).collect::<Vec<_>>(), vec![2, 2]);
    }

    #[test]
    fn spikes_branch_shape() {
        let v = Vocabulary::from_pairs([("s", 3)]).unwrap();
        let r = parse_regex("s^124_134 (s^134_124)* s^123_<>", &v).unwrap();
        assert!(matches!(&r, Regex::Concat(xs) if xs.len() == 3 && matches!(xs[1], Regex::Star(_))));
    }

    #[test]
    fn empty_and_type_errors() {
        let v = abc_vocab();
        assert!(matches!(parse_regex("()", &v), Err(RegexError::EmptyExpression { .. })));
        assert!(matches!(parse_regex("", &v), Err(RegexError::EmptyExpression { .. })));
        assert!(matches!(parse_regex("a^12_12 |", &v), Err(RegexError::EmptyExpression { .. })));
        assert_eq!(typecheck(&parse_regex("(a^13_23)*", &v).unwrap()).unwrap(), (2, 2));
        assert!(matches!(
            typecheck(&parse_regex("(b^32_312)*", &v).unwrap()),
            Err(RegexError::StarNotSquare { .. })
        ));
        assert!(matches!(
            typecheck(&parse_regex("a^13_23 | c^1_<>", &v).unwrap()),
            Err(RegexError::AltTypeMismatch { .. })
        ));
        assert!(matches!(
            typecheck(&parse_regex("b^12_2 b^12_2", &v).unwrap()),
            Err(RegexError::ChainMismatch { .. })
        ));
        assert!(matches!(parse_regex("q^1_1", &v), Err(RegexError::Format(FormatError::Semantic { .. }))));
    }

    #[test]
    fn file_errors_keep_line_numbers() {
        let text = "symbol a(2)\n\n# body\na^12_12\n  a^12_12 )\n";
        match parse_regex_file(text) {
            Err(RegexError::Format(FormatError::Syntax { line: 5, column: 11, .. })) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn top_level_star_accepts_empty_word() {
        let v = abc_vocab();
        let a = regex_to_nfa(&parse_regex("(a^12_12)*", &v).unwrap(), &v).unwrap();
        assert!(a.state(a.start()).is_final);
    }
}
