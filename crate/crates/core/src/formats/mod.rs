//! Readers and writers for automaton specs, graphs, compiled automata, and DOT.

mod automaton;
mod dfa_file;
mod dot;
mod graph_file;
pub(crate) mod lexer;

pub use automaton::{parse_automaton_spec, write_automaton_spec};
pub(crate) use automaton::parse_symbol_header;
pub use dfa_file::{read_dfa, write_dfa, DFA_FORMAT_VERSION};
pub use dot::{automaton_to_dot, graph_to_dot};
pub use graph_file::{parse_graph, write_graph};
pub use lexer::parse_symbol;

/// SHA-256 of the automaton's canonical spec text.
pub fn automaton_digest(a: &crate::automaton::TypedAutomaton) -> String {
    dfa_file::digest(&write_automaton_spec(a))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: {message}")]
    Semantic {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid graph: {0}")]
    Invariant(String),
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },
    #[error("checksum mismatch in section [{section}]")]
    ChecksumMismatch { section: String },
}

impl FormatError {
    /// Moves a position-carrying error by `lines` lines, for errors inside an
    /// embedded section.
    pub(crate) fn shifted(self, lines: usize) -> Self {
        match self {
            FormatError::Syntax { line, column, message } => FormatError::Syntax {
                line: line + lines,
                column,
                message,
            },
            FormatError::Semantic { line, column, message } => FormatError::Semantic {
                line: line + lines,
                column,
                message,
            },
            other => other,
        }
    }

    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            FormatError::Syntax { line, column, .. } | FormatError::Semantic { line, column, .. } => {
                Some((*line, *column))
            }
            _ => None,
        }
    }
}
