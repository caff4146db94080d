use super::symbol::{AtomSymbol, BlankSymbol, GraphSymbol, Vocabulary};
use super::ModelError;

/// Dense node index inside a [`Graph`].
pub type NodeId = u32;
/// Dense edge index inside a [`Graph`].
pub type EdgeId = u32;

/// Edge-labeled hypergraph with ordered attachments and ordered front/rear
/// interfaces. Edge storage is flat: labels are interned into a small table
/// and attachments live in one contiguous array.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    node_count: usize,
    node_names: Option<Vec<String>>,
    labels: Vec<String>,
    edge_label: Vec<u32>,
    att_offsets: Vec<u32>,
    att: Vec<NodeId>,
    front: Vec<NodeId>,
    rear: Vec<NodeId>,
}

impl Graph {
    pub fn new() -> Self {
        Self {
            att_offsets: vec![0],
            ..Self::default()
        }
    }

    pub fn with_capacity(nodes: usize, edges: usize, attachments: usize) -> Self {
        let mut att_offsets = Vec::with_capacity(edges + 1);
        att_offsets.push(0);
        Self {
            node_count: nodes,
            att_offsets,
            edge_label: Vec::with_capacity(edges),
            att: Vec::with_capacity(attachments),
            ..Self::default()
        }
    }

    pub fn add_node(&mut self) -> NodeId {
        self.node_count += 1;
        if let Some(names) = &mut self.node_names {
            names.push((self.node_count).to_string());
        }
        (self.node_count - 1) as NodeId
    }

    pub fn add_nodes(&mut self, count: usize) {
        for _ in 0..count {
            self.add_node();
        }
    }

    pub fn intern_label(&mut self, label: &str) -> u32 {
        match self.labels.iter().position(|l| l == label) {
            Some(i) => i as u32,
            None => {
                self.labels.push(label.to_string());
                (self.labels.len() - 1) as u32
            }
        }
    }

    /// Appends an edge without validation; see [`Graph::validate`].
    pub fn add_edge(&mut self, label: &str, attachment: &[NodeId]) -> EdgeId {
        let id = self.intern_label(label);
        self.add_edge_with_label_id(id, attachment)
    }

    pub fn add_edge_with_label_id(&mut self, label: u32, attachment: &[NodeId]) -> EdgeId {
        if self.att_offsets.is_empty() {
            self.att_offsets.push(0);
        }
        self.edge_label.push(label);
        self.att.extend_from_slice(attachment);
        self.att_offsets.push(self.att.len() as u32);
        (self.edge_label.len() - 1) as EdgeId
    }

    pub fn set_front(&mut self, front: Vec<NodeId>) {
        self.front = front;
    }

    pub fn set_rear(&mut self, rear: Vec<NodeId>) {
        self.rear = rear;
    }

    pub fn set_node_names(&mut self, names: Vec<String>) {
        debug_assert_eq!(names.len(), self.node_count);
        self.node_names = Some(names);
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_label.len()
    }

    pub fn front(&self) -> &[NodeId] {
        &self.front
    }

    pub fn rear(&self) -> &[NodeId] {
        &self.rear
    }

    /// `(|front|, |rear|)`.
    pub fn graph_type(&self) -> (usize, usize) {
        (self.front.len(), self.rear.len())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edge_label(&self, e: EdgeId) -> &str {
        &self.labels[self.edge_label[e as usize] as usize]
    }

    pub fn edge_label_id(&self, e: EdgeId) -> u32 {
        self.edge_label[e as usize]
    }

    pub fn attachment(&self, e: EdgeId) -> &[NodeId] {
        let e = e as usize;
        &self.att[self.att_offsets[e] as usize..self.att_offsets[e + 1] as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &str, &[NodeId])> + '_ {
        (0..self.edge_count() as EdgeId).map(move |e| (e, self.edge_label(e), self.attachment(e)))
    }

    pub fn node_name(&self, v: NodeId) -> String {
        match &self.node_names {
            Some(names) => names[v as usize].clone(),
            None => (v + 1).to_string(),
        }
    }

    pub fn node_names(&self) -> Option<&[String]> {
        self.node_names.as_deref()
    }

    /// Per-node count of incident attachments.
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.node_count];
        for &v in &self.att {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Nodes without incident edges.
    pub fn discrete_nodes(&self) -> Vec<NodeId> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| v as NodeId)
            .collect()
    }

    /// Checks structural invariants, and label ranks when a vocabulary is given.
    pub fn validate(&self, vocab: Option<&Vocabulary>) -> Result<(), ModelError> {
        let n = self.node_count as NodeId;
        for (e, label, att) in self.edges() {
            if let Some(vocab) = vocab {
                let rank = vocab
                    .rank(label)
                    .ok_or_else(|| ModelError::UnknownLabel(label.to_string()))?;
                if rank != att.len() {
                    return Err(ModelError::WrongArity {
                        edge: e,
                        expected: rank,
                        found: att.len(),
                    });
                }
            }
            for (i, &v) in att.iter().enumerate() {
                if v >= n {
                    return Err(ModelError::NodeOutOfRange(v));
                }
                if att[..i].contains(&v) {
                    return Err(ModelError::RepeatedAttachment { edge: e, node: v });
                }
            }
        }
        for (what, seq) in [("front", &self.front), ("rear", &self.rear)] {
            for (i, &v) in seq.iter().enumerate() {
                if v >= n {
                    return Err(ModelError::NodeOutOfRange(v));
                }
                if seq[..i].contains(&v) {
                    return Err(ModelError::RepeatedInterfaceNode { part: what, node: v });
                }
            }
        }
        Ok(())
    }

    /// `G ⊙ H`: disjoint union with `rear(G)[i]` merged into `front(H)[i]`.
    pub fn concat(&self, other: &Graph) -> Result<Graph, ModelError> {
        if self.rear.len() != other.front.len() {
            return Err(ModelError::TypeMismatch {
                rear: self.rear.len(),
                front: other.front.len(),
            });
        }
        let mut out = self.clone();
        out.node_names = None;
        let mut map: Vec<Option<NodeId>> = vec![None; other.node_count];
        for (i, &v) in other.front.iter().enumerate() {
            map[v as usize] = Some(self.rear[i]);
        }
        let map: Vec<NodeId> = map
            .into_iter()
            .map(|m| m.unwrap_or_else(|| out.add_node()))
            .collect();
        for (_, label, att) in other.edges() {
            let att: Vec<NodeId> = att.iter().map(|&v| map[v as usize]).collect();
            out.add_edge(label, &att);
        }
        out.rear = other.rear.iter().map(|&v| map[v as usize]).collect();
        Ok(out)
    }

    /// Same graph with edges listed in the order `perm` (a permutation of edge ids).
    pub fn permute_edges(&self, perm: &[EdgeId]) -> Graph {
        debug_assert_eq!(perm.len(), self.edge_count());
        let mut out = Graph {
            node_count: self.node_count,
            node_names: self.node_names.clone(),
            labels: self.labels.clone(),
            edge_label: Vec::with_capacity(perm.len()),
            att_offsets: Vec::with_capacity(perm.len() + 1),
            att: Vec::with_capacity(self.att.len()),
            front: self.front.clone(),
            rear: self.rear.clone(),
        };
        out.att_offsets.push(0);
        for &e in perm {
            out.add_edge_with_label_id(self.edge_label[e as usize], self.attachment(e));
        }
        out
    }

    /// Stable counting sort of the edges by `key(e) < keys`, in one pass over
    /// the edge data. Returns the sorted graph and the original id of each of
    /// its edges.
    pub fn sort_edges_by_key(&self, keys: usize, key: impl Fn(&[NodeId]) -> usize) -> (Graph, Vec<EdgeId>) {
        let m = self.edge_count();
        let mut edge_start = vec![0u32; keys + 1];
        let mut att_start = vec![0u32; keys + 1];
        let mut key_of = Vec::with_capacity(m);
        for e in 0..m as EdgeId {
            let att = self.attachment(e);
            let k = key(att);
            edge_start[k + 1] += 1;
            att_start[k + 1] += att.len() as u32;
            key_of.push(k as u32);
        }
        for k in 1..=keys {
            edge_start[k] += edge_start[k - 1];
            att_start[k] += att_start[k - 1];
        }
        let mut edge_label = vec![0u32; m];
        let mut att_offsets = vec![0u32; m + 1];
        let mut att = vec![0 as NodeId; self.att.len()];
        let mut original = vec![0 as EdgeId; m];
        for (e, &k) in key_of.iter().enumerate() {
            let k = k as usize;
            let (pos, at) = (edge_start[k] as usize, att_start[k] as usize);
            let src = self.attachment(e as EdgeId);
            edge_label[pos] = self.edge_label[e];
            att_offsets[pos] = at as u32;
            att[at..at + src.len()].copy_from_slice(src);
            original[pos] = e as EdgeId;
            edge_start[k] += 1;
            att_start[k] += src.len() as u32;
        }
        att_offsets[m] = self.att.len() as u32;
        let out = Graph {
            node_count: self.node_count,
            node_names: self.node_names.clone(),
            labels: self.labels.clone(),
            edge_label,
            att_offsets,
            att,
            front: self.front.clone(),
            rear: self.rear.clone(),
        };
        (out, original)
    }

    /// Edge multiset and interfaces compared verbatim (node ids significant).
    pub fn same_structure(&self, other: &Graph) -> bool {
        self.node_count == other.node_count
            && self.front == other.front
            && self.rear == other.rear
            && self.edge_count() == other.edge_count()
            && self
                .edges()
                .zip(other.edges())
                .all(|((_, l1, a1), (_, l2, a2))| l1 == l2 && a1 == a2)
    }
}

/// Incremental left fold of `⊙` over symbol interpretations.
///
/// Appending a symbol only touches the new nodes and the current rear, so
/// interpreting a long word is linear in its length.
#[derive(Debug, Clone)]
pub struct Interpreter {
    graph: Graph,
    rear: Vec<NodeId>,
    symbols: usize,
}

impl Interpreter {
    /// Starts from the discrete graph whose front and rear are `arity` fresh nodes.
    pub fn with_front(arity: usize) -> Self {
        let mut graph = Graph::new();
        graph.add_nodes(arity);
        let front: Vec<NodeId> = (0..arity as NodeId).collect();
        graph.set_front(front.clone());
        Self {
            graph,
            rear: front,
            symbols: 0,
        }
    }

    pub fn push(&mut self, symbol: &GraphSymbol) -> Result<(), ModelError> {
        if symbol.front_arity() != self.rear.len() {
            return Err(ModelError::InvalidString {
                position: self.symbols,
            });
        }
        match symbol {
            GraphSymbol::Atom(a) => self.push_atom(a),
            GraphSymbol::Blank(b) => self.push_blank(b),
        }
        self.symbols += 1;
        Ok(())
    }

    fn push_atom(&mut self, atom: &AtomSymbol) {
        let n = atom.n();
        let mut map: Vec<NodeId> = vec![NodeId::MAX; n + 1];
        for (slot, &node) in atom.front().iter().enumerate() {
            map[node] = self.rear[slot];
        }
        for m in map.iter_mut().skip(1) {
            if *m == NodeId::MAX {
                *m = self.graph.add_node();
            }
        }
        let label = self.graph.intern_label(atom.label());
        let att: Vec<NodeId> = (1..=atom.rank()).map(|i| map[i]).collect();
        self.graph.add_edge_with_label_id(label, &att);
        self.rear = atom.rear().iter().map(|&i| map[i]).collect();
    }

    fn push_blank(&mut self, blank: &BlankSymbol) {
        self.rear = blank.rear().iter().map(|&i| self.rear[i - 1]).collect();
    }

    pub fn finish(mut self) -> Graph {
        self.graph.set_rear(self.rear);
        self.graph
    }
}

/// `⟦s⟧` for a single symbol.
pub fn interpret_symbol(symbol: &GraphSymbol) -> Graph {
    let mut g = Graph::new();
    match symbol {
        GraphSymbol::Atom(a) => {
            g.add_nodes(a.n());
            let att: Vec<NodeId> = (0..a.rank() as NodeId).collect();
            g.add_edge(a.label(), &att);
            g.set_front(a.front().iter().map(|&i| (i - 1) as NodeId).collect());
            g.set_rear(a.rear().iter().map(|&i| (i - 1) as NodeId).collect());
        }
        GraphSymbol::Blank(b) => {
            g.add_nodes(b.n());
            g.set_front((0..b.n() as NodeId).collect());
            g.set_rear(b.rear().iter().map(|&i| (i - 1) as NodeId).collect());
        }
    }
    g
}

/// `⟦w⟧` for a non-empty, type-valid symbol string.
pub fn interpret_string(word: &[GraphSymbol]) -> Result<Graph, ModelError> {
    let first = word.first().ok_or(ModelError::EmptyString)?;
    let mut it = Interpreter::with_front(first.front_arity());
    for s in word {
        it.push(s)?;
    }
    Ok(it.finish())
}

#[cfg(test)]
mod tests {
    use super::super::symbol::{make_atom, make_blank};
    use super::*;

    fn abc() -> Vocabulary {
        Vocabulary::from_pairs([("a", 2), ("b", 2), ("c", 2)]).unwrap()
    }

    fn atom(l: &str, f: &[usize], r: &[usize]) -> GraphSymbol {
        make_atom(l, f, r, &abc()).unwrap().into()
    }

    #[test]
    fn interpret_atom_a13_23() {
        let g = interpret_symbol(&atom("a", &[1, 3], &[2, 3]));
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.attachment(0), &[0, 1]);
        assert_eq!(g.front(), &[0, 2]);
        assert_eq!(g.rear(), &[1, 2]);
    }

    #[test]
    fn interpret_atom_b32_312() {
        let g = interpret_symbol(&atom("b", &[3, 2], &[3, 1, 2]));
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.attachment(0), &[0, 1]);
        assert_eq!(g.front(), &[2, 1]);
        assert_eq!(g.rear(), &[2, 0, 1]);
    }

    #[test]
    fn interpret_identity_blank() {
        let g = interpret_symbol(&make_blank(2, &[1, 2]).unwrap().into());
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.front(), &[0, 1]);
        assert_eq!(g.rear(), &[0, 1]);
    }

    #[test]
    fn short_abc_word_is_a_path() {
        let w = [atom("a", &[1, 3], &[2, 3]), atom("b", &[1, 2], &[2]), atom("c", &[1], &[])];
        let g = interpret_string(&w).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.graph_type(), (2, 0));
        // a(f1, x), b(x, f2), c(f2, y)
        let f = g.front();
        assert_eq!(g.attachment(0)[0], f[0]);
        assert_eq!(g.attachment(1), &[g.attachment(0)[1], f[1]]);
        assert_eq!(g.attachment(2)[0], f[1]);
    }

    #[test]
    fn broken_chain_is_rejected() {
        let w = [atom("a", &[1, 3], &[2, 3]), atom("b", &[1, 2], &[2]), atom("b", &[1, 2], &[2])];
        assert_eq!(interpret_string(&w).unwrap_err(), ModelError::InvalidString { position: 2 });
        assert_eq!(interpret_string(&[]).unwrap_err(), ModelError::EmptyString);
    }

    #[test]
    fn concat_type_mismatch() {
        let t = interpret_string(&[
            atom("a", &[1, 3, 4], &[2, 3, 4]),
            atom("b", &[1, 2, 3], &[3]),
            atom("c", &[1], &[]),
        ])
        .unwrap();
        let s = interpret_string(&[
            atom("a", &[1, 3], &[2, 3]),
            atom("b", &[3, 2], &[3, 1, 2]),
            atom("c", &[3, 4, 1], &[3, 4, 2]),
        ])
        .unwrap();
        assert!(matches!(t.concat(&s), Err(ModelError::TypeMismatch { rear: 0, front: 2 })));
        let st = s.concat(&t).unwrap();
        assert_eq!((st.node_count(), st.edge_count(), st.graph_type()), (7, 6, (2, 0)));
    }

    #[test]
    fn validate_catches_repeated_attachment() {
        let mut g = Graph::new();
        g.add_nodes(1);
        g.add_edge("a", &[0, 0]);
        assert!(matches!(g.validate(None), Err(ModelError::RepeatedAttachment { .. })));
    }
}
