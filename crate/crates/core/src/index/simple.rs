use crate::model::{EdgeId, Graph, NodeId};

use super::{IndexError, NIL};

/// One doubly linked list of unread edges per label, scanned linearly.
#[derive(Debug, Clone)]
pub struct SimpleIndex {
    heads: Vec<u32>,
    prev: Vec<u32>,
    next: Vec<u32>,
    read: Vec<bool>,
}

impl SimpleIndex {
    pub fn build(g: &Graph) -> Self {
        let m = g.edge_count();
        let mut idx = Self {
            heads: vec![NIL; g.labels().len()],
            prev: vec![NIL; m],
            next: vec![NIL; m],
            read: vec![false; m],
        };
        for e in (0..m as EdgeId).rev() {
            let l = g.edge_label_id(e) as usize;
            let head = idx.heads[l];
            idx.next[e as usize] = head;
            if head != NIL {
                idx.prev[head as usize] = e;
            }
            idx.heads[l] = e;
        }
        idx
    }

    /// First unread edge with graph label id `label` whose attachment at each
    /// `(position, node)` pair of `bound` is that node and whose other
    /// attachments are all unencountered.
    pub fn lookup(
        &self,
        g: &Graph,
        label: Option<u32>,
        bound: &[(usize, NodeId)],
        encountered: &[bool],
    ) -> Option<EdgeId> {
        let mut e = self.heads[label? as usize];
        while e != NIL {
            let att = g.attachment(e);
            let fits = bound.iter().all(|&(p, v)| att[p] == v)
                && att
                    .iter()
                    .enumerate()
                    .all(|(p, &v)| bound.iter().any(|&(q, _)| q == p) || !encountered[v as usize]);
            if fits {
                return Some(e);
            }
            e = self.next[e as usize];
        }
        None
    }

    pub fn on_read(&mut self, g: &Graph, e: EdgeId) -> Result<(), IndexError> {
        if std::mem::replace(&mut self.read[e as usize], true) {
            return Err(IndexError::DoubleRead(e));
        }
        let (p, n) = (self.prev[e as usize], self.next[e as usize]);
        if p == NIL {
            self.heads[g.edge_label_id(e) as usize] = n;
        } else {
            self.next[p as usize] = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        }
        Ok(())
    }
}
