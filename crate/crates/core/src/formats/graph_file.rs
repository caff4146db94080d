//! JSON graph documents: `{"nodes": [...], "edges": [{"label": ..., "att": [...]}], "front": [...], "rear": [...]}`.
//!
//! Node ids may be numbers or strings; they are opaque and mapped to dense
//! indices in order of the `nodes` list.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Deserialize;

use super::FormatError;
use crate::model::{Graph, NodeId, Vocabulary};

#[derive(Deserialize)]
#[serde(untagged)]
enum Id {
    Num(u64),
    Str(String),
}

impl Id {
    fn into_name(self) -> String {
        match self {
            Id::Num(n) => n.to_string(),
            Id::Str(s) => s,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    label: String,
    att: Vec<Id>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    nodes: Vec<Id>,
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    front: Vec<Id>,
    #[serde(default)]
    rear: Vec<Id>,
}

/// Parses and validates a graph. With a vocabulary, labels and arities are
/// checked against it as well.
pub fn parse_graph(text: &str, vocab: Option<&Vocabulary>) -> Result<Graph, FormatError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let names: Vec<String> = doc.nodes.into_iter().map(Id::into_name).collect();
    let mut index: HashMap<&str, NodeId> = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i as NodeId).is_some() {
            return Err(FormatError::Invariant(format!("node `{n}` listed twice")));
        }
    }
    let resolve = |id: Id| -> Result<NodeId, FormatError> {
        let name = id.into_name();
        index
            .get(name.as_str())
            .copied()
            .ok_or_else(|| FormatError::Invariant(format!("unknown node `{name}`")))
    };
    let attachments: usize = doc.edges.iter().map(|e| e.att.len()).sum();
    let mut g = Graph::with_capacity(names.len(), doc.edges.len(), attachments);
    let mut att = Vec::new();
    for e in doc.edges {
        att.clear();
        for id in e.att {
            att.push(resolve(id)?);
        }
        g.add_edge(&e.label, &att);
    }
    let front = doc.front.into_iter().map(resolve).collect::<Result<_, _>>()?;
    let rear = doc.rear.into_iter().map(resolve).collect::<Result<_, _>>()?;
    g.set_front(front);
    g.set_rear(rear);
    if names.iter().enumerate().any(|(i, n)| *n != (i + 1).to_string()) {
        g.set_node_names(names);
    }
    g.validate(vocab).map_err(|e| FormatError::Invariant(e.to_string()))?;
    Ok(g)
}

fn write_id(out: &mut String, name: &str) {
    let canonical = !name.is_empty()
        && name.bytes().all(|b| b.is_ascii_digit())
        && (name == "0" || !name.starts_with('0'))
        && name.parse::<u64>().is_ok();
    if canonical {
        out.push_str(name);
    } else {
        out.push_str(&serde_json::to_string(name).expect("string serializes"));
    }
}

fn write_ids(out: &mut String, g: &Graph, ids: &[NodeId]) {
    out.push('[');
    for (i, &v) in ids.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_id(out, &g.node_name(v));
    }
    out.push(']');
}

/// Writes one edge per line.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(32 * g.edge_count() + 16 * g.node_count() + 64);
    out.push_str("{\n  \"nodes\": ");
    let all: Vec<NodeId> = (0..g.node_count() as NodeId).collect();
    write_ids(&mut out, g, &all);
    out.push_str(",\n  \"edges\": [");
    for (e, label, att) in g.edges() {
        out.push_str(if e == 0 { "\n    " } else { ",\n    " });
        let _ = write!(out, "{{\"label\": {}, \"att\": ", serde_json::to_string(label).expect("string serializes"));
        write_ids(&mut out, g, att);
        out.push('}');
    }
    out.push_str(if g.edge_count() > 0 { "\n  ],\n  \"front\": " } else { "],\n  \"front\": " });
    write_ids(&mut out, g, g.front());
    out.push_str(",\n  \"rear\": ");
    write_ids(&mut out, g, g.rear());
    out.push_str("\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: &str = r#"{"nodes": [1,2,3,4,5],
        "edges": [{"label":"a","att":[1,2]}, {"label":"b","att":[3,4]}, {"label":"c","att":[4,5]}],
        "front": [1,4], "rear": [2,3,5]}"#;

    #[test]
    fn parses_graph_s() {
        let g = parse_graph(S, None).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.front(), &[0, 3]);
        assert_eq!(g.rear(), &[1, 2, 4]);
        assert!(g.node_names().is_none());
        let again = parse_graph(&write_graph(&g), None).unwrap();
        assert!(g.same_structure(&again));
    }

    #[test]
    fn empty_graph() {
        let g = parse_graph(r#"{"nodes": [], "edges": [], "front": [], "rear": []}"#, None).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        assert!(parse_graph(&write_graph(&g), None).is_ok());
    }

    #[test]
    fn string_ids_survive() {
        let text = r#"{"nodes": ["hub", 7], "edges": [{"label":"s","att":["hub",7]}], "front": ["hub"], "rear": []}"#;
        let g = parse_graph(text, None).unwrap();
        let out = write_graph(&g);
        assert!(out.contains("\"hub\""));
        assert!(out.contains(", 7]"));
        assert!(parse_graph(&out, None).unwrap().same_structure(&g));
    }

    #[test]
    fn invariant_violations() {
        let rep = r#"{"nodes": [1], "edges": [{"label":"a","att":[1,1]}], "front": [], "rear": []}"#;
        assert!(matches!(parse_graph(rep, None), Err(FormatError::Invariant(_))));
        let unknown = r#"{"nodes": [1], "edges": [{"label":"a","att":[1,2]}]}"#;
        assert!(matches!(parse_graph(unknown, None), Err(FormatError::Invariant(_))));
        let arity = r#"{"nodes": [1,2,3], "edges": [{"label":"a","att":[1,2,3]}]}"#;
        let v = Vocabulary::from_pairs([("a", 2)]).unwrap();
        assert!(matches!(parse_graph(arity, Some(&v)), Err(FormatError::Invariant(_))));
        assert!(matches!(parse_graph("{\"nodes\": [", None), Err(FormatError::Syntax { .. })));
    }
}
