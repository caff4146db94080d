//! Brute-force isomorphism test for small graphs, used as a test oracle.

use super::graph::{EdgeId, Graph, NodeId};
use super::ModelError;

/// Default edge bound above which [`iso_check`] refuses to search.
pub const DEFAULT_ISO_LIMIT: usize = 64;

/// True iff a bijection on nodes and edges preserves labels, attachment order,
/// and maps `front(g)` to `front(h)` and `rear(g)` to `rear(h)` pointwise.
pub fn iso_check(g: &Graph, h: &Graph) -> Result<bool, ModelError> {
    iso_check_bounded(g, h, DEFAULT_ISO_LIMIT)
}

pub fn iso_check_bounded(g: &Graph, h: &Graph, limit: usize) -> Result<bool, ModelError> {
    let size = g.edge_count().max(h.edge_count());
    if size > limit {
        return Err(ModelError::SizeLimitExceeded { edges: size, limit });
    }
    if g.node_count() != h.node_count()
        || g.edge_count() != h.edge_count()
        || g.graph_type() != h.graph_type()
    {
        return Ok(false);
    }
    let mut lg: Vec<(&str, usize)> = g.edges().map(|(_, l, a)| (l, a.len())).collect();
    let mut lh: Vec<(&str, usize)> = h.edges().map(|(_, l, a)| (l, a.len())).collect();
    lg.sort_unstable();
    lh.sort_unstable();
    if lg != lh {
        return Ok(false);
    }
    let dg = g.degrees();
    let dh = h.degrees();
    let mut sg = dg.clone();
    let mut sh = dh.clone();
    sg.sort_unstable();
    sh.sort_unstable();
    if sg != sh {
        return Ok(false);
    }

    let mut search = Search {
        g,
        h,
        dg,
        dh,
        fwd: vec![None; g.node_count()],
        bwd: vec![None; h.node_count()],
        used: vec![false; h.edge_count()],
        incidence: incidence(h),
        order: Vec::new(),
    };
    for (a, b) in g.front().iter().zip(h.front()).chain(g.rear().iter().zip(h.rear())) {
        if !search.bind(*a, *b, &mut Vec::new()) {
            return Ok(false);
        }
    }
    search.order = edge_order(g);
    Ok(search.extend(0))
}

fn incidence(h: &Graph) -> Vec<Vec<(EdgeId, usize)>> {
    let mut inc = vec![Vec::new(); h.node_count()];
    for (e, _, att) in h.edges() {
        for (i, &v) in att.iter().enumerate() {
            inc[v as usize].push((e, i));
        }
    }
    inc
}

/// Orders edges so that each one shares as many nodes as possible with the
/// interfaces and the edges before it.
fn edge_order(g: &Graph) -> Vec<EdgeId> {
    let mut reached = vec![false; g.node_count()];
    for &v in g.front().iter().chain(g.rear()) {
        reached[v as usize] = true;
    }
    let mut left: Vec<EdgeId> = (0..g.edge_count() as EdgeId).collect();
    let mut order = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .max_by_key(|(i, &e)| {
                let hits = g.attachment(e).iter().filter(|&&v| reached[v as usize]).count();
                (hits, std::cmp::Reverse(*i))
            })
            .expect("non-empty");
        let e = left.remove(pos);
        for &v in g.attachment(e) {
            reached[v as usize] = true;
        }
        order.push(e);
    }
    order
}

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    dg: Vec<u32>,
    dh: Vec<u32>,
    fwd: Vec<Option<NodeId>>,
    bwd: Vec<Option<NodeId>>,
    used: Vec<bool>,
    incidence: Vec<Vec<(EdgeId, usize)>>,
    order: Vec<EdgeId>,
}

impl Search<'_> {
    fn bind(&mut self, a: NodeId, b: NodeId, trail: &mut Vec<NodeId>) -> bool {
        match (self.fwd[a as usize], self.bwd[b as usize]) {
            (Some(x), _) => x == b,
            (None, Some(_)) => false,
            (None, None) => {
                if self.dg[a as usize] != self.dh[b as usize] {
                    return false;
                }
                self.fwd[a as usize] = Some(b);
                self.bwd[b as usize] = Some(a);
                trail.push(a);
                true
            }
        }
    }

    fn undo(&mut self, trail: &[NodeId]) {
        for &a in trail {
            let b = self.fwd[a as usize].take().expect("bound");
            self.bwd[b as usize] = None;
        }
    }

    fn candidates(&self, e: EdgeId) -> Vec<EdgeId> {
        let att = self.g.attachment(e);
        let label = self.g.edge_label(e);
        let anchored = att
            .iter()
            .enumerate()
            .find_map(|(i, &v)| self.fwd[v as usize].map(|w| (i, w)));
        let fits = |f: EdgeId| {
            !self.used[f as usize]
                && self.h.edge_label(f) == label
                && self.h.attachment(f).len() == att.len()
        };
        match anchored {
            Some((i, w)) => self.incidence[w as usize]
                .iter()
                .filter(|&&(f, j)| j == i && fits(f))
                .map(|&(f, _)| f)
                .collect(),
            None => (0..self.h.edge_count() as EdgeId).filter(|&f| fits(f)).collect(),
        }
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let e = self.order[depth];
        for f in self.candidates(e) {
            let mut trail = Vec::new();
            let ok = self
                .g
                .attachment(e)
                .iter()
                .zip(self.h.attachment(f))
                .all(|(&a, &b)| self.bind(a, b, &mut trail));
            if ok {
                self.used[f as usize] = true;
                if self.extend(depth + 1) {
                    return true;
                }
                self.used[f as usize] = false;
            }
            self.undo(&trail);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_s() -> Graph {
        let mut g = Graph::new();
        g.add_nodes(5);
        g.add_edge("a", &[0, 1]);
        g.add_edge("b", &[2, 3]);
        g.add_edge("c", &[3, 4]);
        g.set_front(vec![0, 3]);
        g.set_rear(vec![1, 2, 4]);
        g
    }

    #[test]
    fn identical_graphs_are_isomorphic() {
        assert!(iso_check(&graph_s(), &graph_s()).unwrap());
    }

    #[test]
    fn interface_order_matters() {
        let mut r = graph_s();
        r.set_front(vec![3, 0]);
        assert!(!iso_check(&graph_s(), &r).unwrap());
    }

    #[test]
    fn renumbered_nodes_and_edges() {
        let mut g = Graph::new();
        g.add_nodes(5);
        // node k of S becomes 4 - k; edges listed backwards
        g.add_edge("c", &[1, 0]);
        g.add_edge("b", &[2, 1]);
        g.add_edge("a", &[4, 3]);
        g.set_front(vec![4, 1]);
        g.set_rear(vec![3, 2, 0]);
        assert!(iso_check(&graph_s(), &g).unwrap());
    }

    #[test]
    fn size_limit() {
        let mut g = Graph::new();
        g.add_nodes(2);
        for _ in 0..5 {
            g.add_edge("a", &[0, 1]);
        }
        assert!(matches!(
            iso_check_bounded(&g, &g, 4),
            Err(ModelError::SizeLimitExceeded { .. })
        ));
    }
}
