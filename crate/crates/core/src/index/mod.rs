//! Candidate-edge lookup for linear recognition.
//!
//! [`EdgeIndex`] keeps, for every query signature `(label, bound positions)`,
//! a hash table from the nodes at the bound positions to an intrusive list of
//! unread edges whose remaining attachments are all still unencountered. The
//! head of a bucket is therefore always a matching edge. [`SimpleIndex`] keeps
//! one list per label and scans it.

mod simple;

pub use simple::SimpleIndex;

use crate::automaton::Dfa;
use crate::model::{EdgeId, Graph, NodeId};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("edge {0} was read twice")]
    DoubleRead(EdgeId),
    #[error("node {0} was encountered twice")]
    DoubleEncounter(NodeId),
    #[error("unknown query signature {0}")]
    UnknownSignature(usize),
}

/// Label plus the 0-based attachment positions bound to the current front.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuerySignature {
    pub label: String,
    pub bound: Vec<usize>,
}

/// Distinct signatures of the atom symbols of `dfa`, in transition order.
pub fn signatures(dfa: &Dfa) -> Vec<QuerySignature> {
    let mut out: Vec<QuerySignature> = Vec::new();
    for t in dfa.automaton().transitions() {
        if let Some(atom) = t.symbol.as_atom() {
            let sig = QuerySignature {
                label: atom.label().to_string(),
                bound: atom.bound_positions().iter().map(|&(p, _)| p).collect(),
            };
            if !out.contains(&sig) {
                out.push(sig);
            }
        }
    }
    out
}

fn mix_key(key: &[NodeId]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &k in key {
        h = (h.rotate_left(5) ^ k as u64).wrapping_mul(0x517c_c1b7_2722_0a95);
    }
    h ^ (h >> 29)
}

/// Slots per block; see [`SigTable::home`].
const BLOCK: usize = 16;

#[derive(Debug, Clone)]
struct SigTable {
    bound: Vec<usize>,
    /// Maps a node id to a block: `(id * scale) >> 32`.
    scale: u64,
    /// Open-addressing slots holding bucket ids.
    slots: Vec<u32>,
    /// Bucket keys, `bound.len()` nodes each.
    keys: Vec<NodeId>,
    heads: Vec<u32>,
}

impl SigTable {
    fn new(bound: Vec<usize>, expected: usize, nodes: usize) -> Self {
        // Exactly twice the expected keys, rounded up to whole blocks, so the
        // load factor does not jump with the input size.
        let cap = (2 * expected).max(BLOCK).next_multiple_of(BLOCK);
        let bound_len = bound.len();
        Self {
            bound,
            scale: ((cap as u64) << 32) / nodes.max(1) as u64,
            slots: vec![NIL; cap],
            keys: Vec::with_capacity(expected * bound_len),
            heads: Vec::with_capacity(expected),
        }
    }

    fn key_of(&self, b: usize) -> &[NodeId] {
        let w = self.bound.len();
        &self.keys[b * w..(b + 1) * w]
    }

    /// First probe slot. The block comes from the largest node id in the
    /// key, scaled to the table size, so a run moving through nearby node
    /// ids probes nearby memory; the offset inside the block is hashed.
    fn home(&self, key: &[NodeId]) -> usize {
        let top = key.iter().copied().max().unwrap_or(0) as u64;
        let block = ((top * self.scale) >> 32) as usize & !(BLOCK - 1);
        (block | (mix_key(key) as usize & (BLOCK - 1))).min(self.slots.len() - 1)
    }

    /// Bucket id for `key`, or the slot where it would be inserted.
    fn probe(&self, key: &[NodeId]) -> Result<u32, usize> {
        let mut i = self.home(key);
        loop {
            let b = self.slots[i];
            if b == NIL {
                return Err(i);
            }
            if self.key_of(b as usize) == key {
                return Ok(b);
            }
            i += 1;
            if i == self.slots.len() {
                i = 0;
            }
        }
    }

    fn bucket_for_insert(&mut self, key: &[NodeId]) -> u32 {
        match self.probe(key) {
            Ok(b) => b,
            Err(slot) => {
                let b = self.heads.len() as u32;
                self.keys.extend_from_slice(key);
                self.heads.push(NIL);
                self.slots[slot] = b;
                b
            }
        }
    }
}

/// List links of one edge in one signature; `bucket` is `NIL` when unlinked.
#[derive(Debug, Clone, Copy)]
struct Cell {
    prev: u32,
    next: u32,
    bucket: u32,
}

impl Cell {
    const EMPTY: Cell = Cell {
        prev: NIL,
        next: NIL,
        bucket: NIL,
    };
}

/// Per-signature hash-keyed buckets of unread edges.
#[derive(Debug, Clone)]
pub struct EdgeIndex {
    sigs: Vec<QuerySignature>,
    tables: Vec<SigTable>,
    /// Signature ids per graph label id.
    label_sigs: Vec<Vec<usize>>,
    /// First cell of each edge; an edge has one cell per signature of its label.
    cell_base: Vec<u32>,
    cells: Vec<Cell>,
    inc_off: Vec<u32>,
    inc: Vec<(EdgeId, u32)>,
    read: Vec<bool>,
    encountered: Vec<bool>,
    unlinks: usize,
}

impl EdgeIndex {
    /// Builds the index with every edge unread and the nodes flagged in
    /// `encountered` already encountered.
    pub fn build(sigs: &[QuerySignature], g: &Graph, encountered: &[bool]) -> Self {
        let labels = g.labels();
        let label_sigs: Vec<Vec<usize>> = labels
            .iter()
            .map(|l| (0..sigs.len()).filter(|&s| &sigs[s].label == l).collect())
            .collect();
        let mut per_label = vec![0usize; labels.len()];
        let mut cell_base = Vec::with_capacity(g.edge_count() + 1);
        let mut cells = 0u32;
        for e in 0..g.edge_count() as EdgeId {
            let l = g.edge_label_id(e) as usize;
            per_label[l] += 1;
            cell_base.push(cells);
            cells += label_sigs[l].len() as u32;
        }
        cell_base.push(cells);
        let mut tables: Vec<SigTable> = sigs
            .iter()
            .map(|s| {
                let expected = labels
                    .iter()
                    .position(|l| l == &s.label)
                    .map_or(0, |l| per_label[l]);
                SigTable::new(s.bound.clone(), expected, g.node_count())
            })
            .collect();

        let (inc_off, inc) = incidence(g);
        let mut idx = Self {
            sigs: sigs.to_vec(),
            tables: Vec::new(),
            label_sigs,
            cell_base,
            cells: vec![Cell::EMPTY; cells as usize],
            inc_off,
            inc,
            read: vec![false; g.edge_count()],
            encountered: encountered.to_vec(),
            unlinks: 0,
        };

        // Insert in reverse so each bucket lists edges in ascending id order.
        let mut key = Vec::new();
        for e in (0..g.edge_count() as EdgeId).rev() {
            let att = g.attachment(e);
            let l = g.edge_label_id(e) as usize;
            for (local, &s) in idx.label_sigs[l].iter().enumerate() {
                let t = &mut tables[s];
                let clean = att
                    .iter()
                    .enumerate()
                    .all(|(p, &v)| t.bound.binary_search(&p).is_ok() || !encountered[v as usize]);
                if !clean {
                    continue;
                }
                key.clear();
                key.extend(t.bound.iter().map(|&p| att[p]));
                let b = t.bucket_for_insert(&key);
                let cell = (idx.cell_base[e as usize] + local as u32) as usize;
                let head = t.heads[b as usize];
                idx.cells[cell].next = head;
                if head != NIL {
                    let hc = (idx.cell_base[head as usize] + local as u32) as usize;
                    idx.cells[hc].prev = e;
                }
                t.heads[b as usize] = e;
                idx.cells[cell].bucket = b;
            }
        }
        idx.tables = tables;
        idx
    }

    pub fn signatures(&self) -> &[QuerySignature] {
        &self.sigs
    }

    pub fn signature_id(&self, label: &str, bound: &[usize]) -> Option<usize> {
        self.sigs.iter().position(|s| s.label == label && s.bound == bound)
    }

    /// First unread edge in the bucket of `key`.
    pub fn lookup(&self, sig: usize, key: &[NodeId]) -> Result<Option<EdgeId>, IndexError> {
        let t = self.tables.get(sig).ok_or(IndexError::UnknownSignature(sig))?;
        Ok(match t.probe(key) {
            Ok(b) => Some(t.heads[b as usize]).filter(|&h| h != NIL),
            Err(_) => None,
        })
    }

    fn unlink(&mut self, e: EdgeId, local: usize, sig: usize) {
        let base = self.cell_base[e as usize];
        let cell = (base + local as u32) as usize;
        let Cell { prev: p, next: n, bucket: b } = self.cells[cell];
        if b == NIL {
            return;
        }
        if p == NIL {
            self.tables[sig].heads[b as usize] = n;
        } else {
            self.cells[(self.cell_base[p as usize] + local as u32) as usize].next = n;
        }
        if n != NIL {
            self.cells[(self.cell_base[n as usize] + local as u32) as usize].prev = p;
        }
        self.cells[cell] = Cell::EMPTY;
        self.unlinks += 1;
    }

    /// Removes `e` from every bucket holding it.
    pub fn on_read(&mut self, g: &Graph, e: EdgeId) -> Result<(), IndexError> {
        if std::mem::replace(&mut self.read[e as usize], true) {
            return Err(IndexError::DoubleRead(e));
        }
        let l = g.edge_label_id(e) as usize;
        for local in 0..self.label_sigs[l].len() {
            let sig = self.label_sigs[l][local];
            self.unlink(e, local, sig);
        }
        Ok(())
    }

    /// Removes the unread edges incident to `v` from every bucket whose
    /// signature leaves `v`'s position unbound.
    pub fn on_encounter(&mut self, g: &Graph, v: NodeId) -> Result<(), IndexError> {
        if std::mem::replace(&mut self.encountered[v as usize], true) {
            return Err(IndexError::DoubleEncounter(v));
        }
        let (lo, hi) = (self.inc_off[v as usize] as usize, self.inc_off[v as usize + 1] as usize);
        for i in lo..hi {
            let (e, pos) = self.inc[i];
            if self.read[e as usize] {
                continue;
            }
            let l = g.edge_label_id(e) as usize;
            for local in 0..self.label_sigs[l].len() {
                let sig = self.label_sigs[l][local];
                if self.tables[sig].bound.binary_search(&(pos as usize)).is_err() {
                    self.unlink(e, local, sig);
                }
            }
        }
        Ok(())
    }

    /// Unlink operations performed since the build.
    pub fn unlinks(&self) -> usize {
        self.unlinks
    }

    /// List cells plus table slots.
    pub fn cells(&self) -> usize {
        self.cells.len() + self.tables.iter().map(|t| t.slots.len() + t.heads.len()).sum::<usize>()
    }

    /// Full rescan of every bucket against its membership condition.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        for (s, t) in self.tables.iter().enumerate() {
            let Some(l) = g.labels().iter().position(|x| x == &self.sigs[s].label) else {
                continue;
            };
            let local = self.label_sigs[l].iter().position(|&x| x == s).expect("signature of label") as u32;
            let mut listed = 0usize;
            for b in 0..t.heads.len() {
                let mut e = t.heads[b];
                let mut prev = NIL;
                while e != NIL {
                    let cell = (self.cell_base[e as usize] + local) as usize;
                    if self.cells[cell].prev != prev || self.cells[cell].bucket != b as u32 {
                        return Err(format!("broken links at edge {e} in signature {s}"));
                    }
                    listed += 1;
                    prev = e;
                    e = self.cells[cell].next;
                }
            }
            for e in 0..g.edge_count() as EdgeId {
                if g.edge_label_id(e) as usize != l {
                    continue;
                }
                let att = g.attachment(e);
                let should = !self.read[e as usize]
                    && att.iter().enumerate().all(|(p, &v)| {
                        t.bound.binary_search(&p).is_ok() || !self.encountered[v as usize]
                    });
                let cell = (self.cell_base[e as usize] + local) as usize;
                let b = self.cells[cell].bucket;
                if should != (b != NIL) {
                    return Err(format!("edge {e} membership wrong in signature {s}"));
                }
                if b != NIL {
                    let key: Vec<NodeId> = t.bound.iter().map(|&p| att[p]).collect();
                    if t.key_of(b as usize) != key.as_slice() {
                        return Err(format!("edge {e} in wrong bucket of signature {s}"));
                    }
                    listed = listed.wrapping_sub(1);
                }
            }
            if listed != 0 {
                return Err(format!("stale list entries in signature {s}"));
            }
        }
        Ok(())
    }
}

/// Builds an index for `dfa` over `g` with the front of `g` encountered.
pub fn build_index(dfa: &Dfa, g: &Graph) -> EdgeIndex {
    let mut enc = vec![false; g.node_count()];
    for &v in g.front() {
        enc[v as usize] = true;
    }
    EdgeIndex::build(&signatures(dfa), g, &enc)
}

/// Node ids per sort window in [`locality_sorted`].
const WINDOW_BITS: u32 = 8;

/// `g` with its edges stably sorted by largest attached node id, bucketed
/// into windows of `2^WINDOW_BITS` ids, plus the original id of each edge.
/// Running on the sorted graph keeps per-edge data of edges read close
/// together in time close together in memory. The windows keep the number
/// of scatter targets small enough to stay cache resident.
pub fn locality_sorted(g: &Graph) -> (Graph, Vec<EdgeId>) {
    let keys = (g.node_count() >> WINDOW_BITS) + 2;
    g.sort_edges_by_key(keys, |att| {
        att.iter().copied().max().map_or(0, |v| (v as usize >> WINDOW_BITS) + 1)
    })
}

/// Compressed per-node incidence lists of `(edge, position)`.
pub(crate) fn incidence(g: &Graph) -> (Vec<u32>, Vec<(EdgeId, u32)>) {
    let mut off = vec![0u32; g.node_count() + 1];
    for (_, _, att) in g.edges() {
        for &v in att {
            off[v as usize + 1] += 1;
        }
    }
    for i in 0..g.node_count() {
        off[i + 1] += off[i];
    }
    let mut fill = off.clone();
    let mut inc = vec![(0, 0); off[g.node_count()] as usize];
    for (e, _, att) in g.edges() {
        for (p, &v) in att.iter().enumerate() {
            inc[fill[v as usize] as usize] = (e, p as u32);
            fill[v as usize] += 1;
        }
    }
    (off, inc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_graph;

    const S: &str = include_str!("../../langs/S.json");

    fn sig(label: &str, bound: &[usize]) -> QuerySignature {
        QuerySignature {
            label: label.into(),
            bound: bound.to_vec(),
        }
    }

    fn front_encountered(g: &Graph) -> Vec<bool> {
        let mut enc = vec![false; g.node_count()];
        for &v in g.front() {
            enc[v as usize] = true;
        }
        enc
    }

    #[test]
    fn lookup_after_build() {
        let g = parse_graph(S, None).unwrap();
        let sigs = [sig("a", &[0]), sig("b", &[1]), sig("c", &[0])];
        let mut idx = EdgeIndex::build(&sigs, &g, &front_encountered(&g));
        assert_eq!(idx.lookup(0, &[0]).unwrap(), Some(0));
        assert_eq!(idx.lookup(0, &[3]).unwrap(), None);
        assert_eq!(idx.lookup(1, &[3]).unwrap(), Some(1));
        assert_eq!(idx.lookup(7, &[0]), Err(IndexError::UnknownSignature(7)));
        idx.on_read(&g, 0).unwrap();
        assert_eq!(idx.lookup(0, &[0]).unwrap(), None);
        assert_eq!(idx.on_read(&g, 0), Err(IndexError::DoubleRead(0)));
        idx.validate(&g).unwrap();
    }

    #[test]
    fn encounter_unlinks_unbound_positions_only() {
        let g = parse_graph(S, None).unwrap();
        // c(4,5): position 0 is bound, position 1 is fresh.
        let sigs = [sig("c", &[0]), sig("c", &[])];
        let mut idx = EdgeIndex::build(&sigs, &g, &front_encountered(&g));
        // Node 4 (id 3) is in the front, so c is only in the bound signature.
        assert_eq!(idx.lookup(0, &[3]).unwrap(), Some(2));
        assert_eq!(idx.lookup(1, &[]).unwrap(), None);
        idx.on_encounter(&g, 4).unwrap();
        assert_eq!(idx.lookup(0, &[3]).unwrap(), None);
        assert_eq!(idx.on_encounter(&g, 4), Err(IndexError::DoubleEncounter(4)));
        idx.validate(&g).unwrap();
    }

    #[test]
    fn encounter_of_unrelated_node_keeps_edges() {
        let g = parse_graph(S, None).unwrap();
        let sigs = [sig("b", &[1])];
        let mut idx = EdgeIndex::build(&sigs, &g, &front_encountered(&g));
        let before = idx.unlinks();
        idx.on_encounter(&g, 1).unwrap();
        assert_eq!(idx.unlinks(), before);
        assert_eq!(idx.lookup(0, &[3]).unwrap(), Some(1));
    }

    #[test]
    fn locality_sort_orders_by_largest_node() {
        let mut g = Graph::new();
        g.add_nodes(600);
        g.add_edge("a", &[513, 0]);
        g.add_edge("a", &[0, 1]);
        g.add_edge("a", &[300, 1]);
        g.add_edge("a", &[2, 3]);
        let (sorted, original) = locality_sorted(&g);
        // Windows of 256 ids; ties keep their input order.
        assert_eq!(original, vec![1, 3, 2, 0]);
        assert_eq!(sorted.permute_edges(&[3, 0, 2, 1]).edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        assert_eq!(sorted.attachment(2), &[300, 1]);
    }

    #[test]
    fn empty_graph_has_empty_tables() {
        let g = parse_graph(r#"{"nodes": [], "edges": []}"#, None).unwrap();
        let idx = EdgeIndex::build(&[sig("a", &[])], &g, &[]);
        assert_eq!(idx.lookup(0, &[]).unwrap(), None);
        idx.validate(&g).unwrap();
    }
}
