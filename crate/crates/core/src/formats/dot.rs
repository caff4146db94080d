//! Graphviz export for automata and graphs.

use std::fmt::Write as _;

use crate::automaton::TypedAutomaton;
use crate::model::Graph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// States become nodes (start filled, finals double-circled); transitions
/// become edges labeled with their symbols.
pub fn automaton_to_dot(a: &TypedAutomaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
    for (i, s) in a.states().iter().enumerate() {
        let mut attrs = vec![format!("label={}", quote(&format!("{} ({})", s.name, s.rank)))];
        attrs.push(format!("shape={}", if s.is_final { "doublecircle" } else { "circle" }));
        if i as u32 == a.start() {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=yellow".into());
        }
        let _ = writeln!(out, "  {} [{}];", quote(&s.name), attrs.join(", "));
    }
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&a.state(t.source).name),
            quote(&a.state(t.target).name),
            quote(&t.symbol.to_string())
        );
    }
    out.push_str("}\n");
    out
}

/// Binary edges are drawn as arrows; edges of other ranks become boxes
/// connected to their attached nodes, with attachment positions as labels.
pub fn graph_to_dot(g: &Graph) -> String {
    let mut out = String::from("digraph graph_ {\n");
    for v in 0..g.node_count() as u32 {
        let mut label = g.node_name(v);
        let tags: Vec<String> = [("f", g.front()), ("r", g.rear())]
            .iter()
            .filter_map(|(tag, seq)| seq.iter().position(|&x| x == v).map(|i| format!("{tag}{}", i + 1)))
            .collect();
        if !tags.is_empty() {
            label = format!("{label} [{}]", tags.join(","));
        }
        let _ = writeln!(out, "  n{v} [shape=circle, label={}];", quote(&label));
    }
    for (e, label, att) in g.edges() {
        if att.len() == 2 {
            let _ = writeln!(out, "  n{} -> n{} [label={}];", att[0], att[1], quote(label));
        } else {
            let _ = writeln!(out, "  e{e} [shape=box, label={}];", quote(label));
            for (i, v) in att.iter().enumerate() {
                let _ = writeln!(out, "  e{e} -> n{v} [arrowhead=none, label=\"{}\"];", i + 1);
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_has_no_nodes() {
        let dot = graph_to_dot(&Graph::new());
        assert!(!dot.contains("shape"));
        assert!(dot.starts_with("digraph"));
    }

    #[test]
    fn rank_three_edges_become_boxes() {
        let mut g = Graph::new();
        g.add_nodes(3);
        g.add_edge("s", &[0, 1, 2]);
        let dot = graph_to_dot(&g);
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches("e0 -> n").count(), 3);
    }
}
