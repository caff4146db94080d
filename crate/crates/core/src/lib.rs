//! Finite automata over typed graph symbols.
//!
//! Regular expressions or explicit automata are compiled into minimized
//! deterministic automata, checked for backtracking-free recognition, and used
//! to recognize hypergraphs either by depth-first search or in linear time.

pub mod model;
pub mod automaton;
pub mod formats;
pub mod analysis;
pub mod pipeline;
pub mod regex;
pub mod index;
pub mod recognizer;
pub mod langs;
pub mod bench;
