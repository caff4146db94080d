//! Graphs, graph symbols, and their interpretation.

mod graph;
mod iso;
mod symbol;

pub use graph::{interpret_string, interpret_symbol, EdgeId, Graph, Interpreter, NodeId};
pub use iso::{iso_check, iso_check_bounded, DEFAULT_ISO_LIMIT};
pub use symbol::{
    compose, make_atom, make_blank, AtomSymbol, BlankSymbol, GraphSymbol, Vocabulary,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{0}` declared twice")]
    DuplicateLabel(String),
    #[error("label `{0}` has rank 0")]
    ZeroRank(String),
    #[error("label `{label}` declared with rank {first} and rank {second}")]
    RankConflict {
        label: String,
        first: usize,
        second: usize,
    },
    #[error("index 0 in {part} sequence (indices start at 1)")]
    ZeroIndex { part: &'static str },
    #[error("index {index} repeated in {part} sequence")]
    RepeatedIndex { part: &'static str, index: usize },
    #[error("node {node} is neither attached to the edge nor in the front")]
    OrphanNode { node: usize },
    #[error("rear node {node} is neither attached to the edge nor in the front")]
    RearUnreachable { node: usize },
    #[error("rear arity {rear} does not match front arity {front}")]
    TypeMismatch { rear: usize, front: usize },
    #[error("symbol {position} does not fit the rear arity of its predecessor")]
    InvalidString { position: usize },
    #[error("empty symbol string")]
    EmptyString,
    #[error("edge {edge} has {found} attachments, its label needs {expected}")]
    WrongArity {
        edge: EdgeId,
        expected: usize,
        found: usize,
    },
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("edge {edge} is attached to node {node} twice")]
    RepeatedAttachment { edge: EdgeId, node: NodeId },
    #[error("node {node} repeated in {part} interface")]
    RepeatedInterfaceNode { part: &'static str, node: NodeId },
    #[error("isomorphism check refused: {edges} edges exceed the limit of {limit}")]
    SizeLimitExceeded { edges: usize, limit: usize },
}
