//! Brute-force ground truth for small `n`: explicit descendant sets per
//! node, maintained incrementally from parent-change events and cross-
//! checked against from-scratch recomputation. Exists for correctness,
//! not speed; the runner caps it at a configurable `n`.

use crate::dsu::{NodeId, ParentChangeEvent};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ShadowError {
    #[error("event inconsistent with forest: node {node} has parent {actual}, event says {claimed}")]
    InconsistentEvent { node: u32, actual: u32, claimed: u32 },
    #[error("event would create a cycle: {0} moved under its own descendant")]
    WouldCycle(u32),
}

#[derive(Clone, Debug)]
pub struct ShadowForest {
    n: usize,
    parent: Vec<u32>,
    /// Current descendant set per node; each node is its own descendant.
    descendants: Vec<BTreeSet<u32>>,
    /// Every node that was ever a descendant.
    ever: Vec<BTreeSet<u32>>,
}

impl ShadowForest {
    pub fn new(n: usize) -> Self {
        ShadowForest {
            n,
            parent: (0..n as u32).collect(),
            descendants: (0..n as u32).map(|i| BTreeSet::from([i])).collect(),
            ever: (0..n as u32).map(|i| BTreeSet::from([i])).collect(),
        }
    }

    pub fn from_injected(n: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let mut forest = ShadowForest::new(n);
        for &(node, par) in edges {
            forest.parent[node.index()] = par.0;
        }
        forest.descendants = forest.recompute();
        forest.ever = forest.descendants.clone();
        forest
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Current size: number of descendants.
    pub fn size(&self, p: NodeId) -> u64 {
        self.descendants[p.index()].len() as u64
    }

    /// Number of nodes that were ever a descendant of `p`.
    pub fn ever_size(&self, p: NodeId) -> u64 {
        self.ever[p.index()].len() as u64
    }

    pub fn descendants(&self, p: NodeId) -> &BTreeSet<u32> {
        &self.descendants[p.index()]
    }

    pub fn root_of(&self, p: NodeId) -> NodeId {
        let mut cur = p.0;
        while self.parent[cur as usize] != cur {
            cur = self.parent[cur as usize];
        }
        NodeId(cur)
    }

    pub fn is_root(&self, p: NodeId) -> bool {
        self.parent[p.index()] == p.0
    }

    /// Chain from `p` to its root, inclusive of both.
    fn chain(&self, p: NodeId) -> Vec<u32> {
        let mut chain = vec![p.0];
        let mut cur = p.0;
        while self.parent[cur as usize] != cur {
            cur = self.parent[cur as usize];
            chain.push(cur);
        }
        chain
    }

    /// Applies one pointer rewrite: the moved subtree's nodes leave every
    /// strict ancestor it no longer sits under, and join every new one.
    pub fn apply(&mut self, ev: &ParentChangeEvent) -> Result<(), ShadowError> {
        let node = ev.node.index();
        if self.parent[node] != ev.old_parent.0 {
            return Err(ShadowError::InconsistentEvent {
                node: ev.node.0,
                actual: self.parent[node],
                claimed: ev.old_parent.0,
            });
        }
        if self.descendants[node].contains(&ev.new_parent.0) && ev.new_parent != ev.node {
            return Err(ShadowError::WouldCycle(ev.node.0));
        }
        let moved = self.descendants[node].clone();
        // Strict ancestors before and after the move.
        let before: Vec<u32> = if ev.old_parent == ev.node {
            Vec::new()
        } else {
            self.chain(ev.old_parent)
        };
        let after: Vec<u32> = self.chain(ev.new_parent);
        let after_set: BTreeSet<u32> = after.iter().copied().collect();
        let before_set: BTreeSet<u32> = before.iter().copied().collect();
        for &q in before.iter().filter(|q| !after_set.contains(q)) {
            let set = &mut self.descendants[q as usize];
            for m in &moved {
                set.remove(m);
            }
        }
        for &q in after.iter().filter(|q| !before_set.contains(q)) {
            self.descendants[q as usize].extend(moved.iter().copied());
            self.ever[q as usize].extend(moved.iter().copied());
        }
        self.parent[node] = ev.new_parent.0;
        Ok(())
    }

    /// Descendant sets recomputed from scratch from the parent array.
    pub fn recompute(&self) -> Vec<BTreeSet<u32>> {
        let mut sets: Vec<BTreeSet<u32>> = (0..self.n as u32).map(|i| BTreeSet::from([i])).collect();
        for start in 0..self.n as u32 {
            let mut cur = start;
            while self.parent[cur as usize] != cur {
                cur = self.parent[cur as usize];
                sets[cur as usize].insert(start);
            }
        }
        sets
    }

    /// Incremental sets must equal from-scratch recomputation, and root
    /// sizes must partition `n`.
    pub fn check_consistency(&self) -> Result<(), String> {
        let fresh = self.recompute();
        for p in 0..self.n {
            if fresh[p] != self.descendants[p] {
                return Err(format!(
                    "descendant sets diverge at node {p}: incremental {:?} vs recomputed {:?}",
                    self.descendants[p], fresh[p]
                ));
            }
        }
        let total: usize = (0..self.n)
            .filter(|&p| self.parent[p] as usize == p)
            .map(|p| self.descendants[p].len())
            .sum();
        if total != self.n {
            return Err(format!("root sizes sum to {total}, expected {}", self.n));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsu::{ChangeCause, DsuState, Variant};
    use std::cell::RefCell;
    use std::rc::Rc;

    fn id(i: u32) -> NodeId {
        NodeId(i)
    }

    fn ev(node: u32, old: u32, new: u32, cause: ChangeCause) -> ParentChangeEvent {
        ParentChangeEvent {
            node: id(node),
            old_parent: id(old),
            new_parent: id(new),
            cause,
            step: 0,
            sub: 0,
        }
    }

    #[test]
    fn singleton_link() {
        let mut f = ShadowForest::new(2);
        f.apply(&ev(1, 1, 0, ChangeCause::Union)).unwrap();
        assert_eq!(f.descendants(id(0)), &BTreeSet::from([0, 1]));
        assert_eq!(f.size(id(0)), 2);
        assert_eq!(f.size(id(1)), 1);
        f.check_consistency().unwrap();
    }

    /// Complete binary tree of height 3, compress the leftmost path: the
    /// root's original left child keeps exactly its right-child line,
    /// current size 4, while that remaining child's subtree has size 3.
    #[test]
    fn compression_counterexample_sizes() {
        // Node 0 root; children 1,2; 1's children 3,4; 3's children 7,8, etc.
        let edges: Vec<(NodeId, NodeId)> = (1u32..15).map(|i| (id(i), id((i - 1) / 2))).collect();
        let mut f = ShadowForest::from_injected(15, &edges);
        assert_eq!(f.size(id(0)), 15);
        assert_eq!(f.size(id(1)), 7);
        assert_eq!(f.size(id(3)), 3);
        assert_eq!(f.size(id(7)), 1);
        f.check_consistency().unwrap();

        // Compress leftmost path 7 -> 3 -> 1 -> 0.
        f.apply(&ev(3, 1, 0, ChangeCause::Compression)).unwrap();
        f.apply(&ev(7, 3, 0, ChangeCause::Compression)).unwrap();
        f.check_consistency().unwrap();
        // Node 1 keeps {1, 4, 9, 10}: current size 4.
        assert_eq!(f.size(id(1)), 4);
        // Its remaining child 4 has size 3.
        assert_eq!(f.size(id(4)), 3);
        // Root set unchanged by internal compression.
        assert_eq!(f.size(id(0)), 15);
    }

    #[test]
    fn moving_to_own_root_keeps_root_set() {
        let mut f = ShadowForest::from_injected(3, &[(id(1), id(0)), (id(2), id(1))]);
        let before = f.descendants(id(0)).clone();
        f.apply(&ev(2, 1, 0, ChangeCause::Compression)).unwrap();
        assert_eq!(f.descendants(id(0)), &before);
        assert_eq!(f.size(id(1)), 1);
        f.check_consistency().unwrap();
    }

    #[test]
    fn inconsistent_event_rejected() {
        let mut f = ShadowForest::new(3);
        let r = f.apply(&ev(1, 0, 2, ChangeCause::Compression));
        assert!(matches!(r, Err(ShadowError::InconsistentEvent { .. })));
    }

    #[test]
    fn tracks_dsu_through_random_trace() {
        let mut dsu = DsuState::new(48, Variant::SIZE_ON).unwrap();
        let events: Rc<RefCell<Vec<ParentChangeEvent>>> = Rc::default();
        let sink = events.clone();
        dsu.subscribe(Box::new(move |e| {
            if let crate::dsu::DsuEvent::Parent(pe) = e {
                sink.borrow_mut().push(*pe);
            }
        }))
        .unwrap();
        let mut f = ShadowForest::new(48);
        let mut rng = crate::rng::SplitMix64::new(99);
        for _ in 0..400 {
            let a = id(rng.next_below(48) as u32);
            let b = id(rng.next_below(48) as u32);
            if rng.next_u64() % 3 == 0 {
                dsu.find(a).unwrap();
            } else {
                dsu.union(a, b).unwrap();
            }
            for e in events.borrow_mut().drain(..) {
                f.apply(&e).unwrap();
            }
            for p in 0..48u32 {
                assert_eq!(f.root_of(id(p)), dsu.root_of(id(p)).unwrap());
            }
            for p in 0..48u32 {
                if dsu.is_root(id(p)) {
                    assert_eq!(f.size(id(p)), dsu.size_of(id(p)));
                }
            }
            f.check_consistency().unwrap();
        }
    }
}
