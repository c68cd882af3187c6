//! The union-find forest: union-by-size or union-by-rank, path compression
//! on or off, with an observer hook that sees every parent-pointer rewrite.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Index of an element, valid in `[0, n)` for the state it belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum LinkRule {
    BySize,
    ByRank,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Compression {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Variant {
    pub link: LinkRule,
    pub compression: Compression,
}

impl Variant {
    pub const SIZE_ON: Variant = Variant {
        link: LinkRule::BySize,
        compression: Compression::On,
    };
    pub const SIZE_OFF: Variant = Variant {
        link: LinkRule::BySize,
        compression: Compression::Off,
    };
    pub const RANK_ON: Variant = Variant {
        link: LinkRule::ByRank,
        compression: Compression::On,
    };
    pub const RANK_OFF: Variant = Variant {
        link: LinkRule::ByRank,
        compression: Compression::Off,
    };

    pub const ALL: [Variant; 4] = [
        Variant::SIZE_ON,
        Variant::SIZE_OFF,
        Variant::RANK_ON,
        Variant::RANK_OFF,
    ];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let link = match self.link {
            LinkRule::BySize => "size",
            LinkRule::ByRank => "rank",
        };
        let comp = match self.compression {
            Compression::On => "on",
            Compression::Off => "off",
        };
        write!(f, "{link}-{comp}")
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "size-on" => Ok(Variant::SIZE_ON),
            "size-off" => Ok(Variant::SIZE_OFF),
            "rank-on" => Ok(Variant::RANK_ON),
            "rank-off" => Ok(Variant::RANK_OFF),
            _ => Err(format!(
                "unknown variant {s:?} (expected size-on, size-off, rank-on, rank-off)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DsuError {
    #[error("element count must be at least 1")]
    EmptyDomain,
    #[error("node id {id} out of range for n = {n}")]
    InvalidNode { id: u32, n: usize },
    #[error("an observer is already attached")]
    ObserverTaken,
    #[error("node {0} listed more than once in injected forest")]
    DuplicateNode(u32),
    #[error("injected forest contains a cycle through node {0}")]
    CyclicForest(u32),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ChangeCause {
    Union,
    Compression,
}

/// One parent-pointer rewrite, emitted exactly once per rewrite.
#[derive(Clone, Copy, Debug)]
pub struct ParentChangeEvent {
    pub node: NodeId,
    pub old_parent: NodeId,
    pub new_parent: NodeId,
    pub cause: ChangeCause,
    /// `op_clock` of the external call this rewrite happened in.
    pub step: u64,
    /// 0 for an external find or union's first internal find, 1 for the
    /// second internal find, 2 for the link itself.
    pub sub: u8,
}

#[derive(Clone, Debug)]
pub enum DsuEvent {
    Parent(ParentChangeEvent),
    /// One external Union or Find call completed.
    StepBoundary { step: u64 },
}

pub type Observer = Box<dyn FnMut(&DsuEvent)>;

#[derive(Clone, Debug)]
pub struct FindOutcome {
    pub root: NodeId,
    /// Nodes visited, from the queried node up to and including the root.
    pub path: Vec<NodeId>,
}

#[derive(Debug)]
pub struct UnionOutcome {
    pub root: NodeId,
    pub merged: bool,
    pub find_a: FindOutcome,
    pub find_b: FindOutcome,
}

/// The forest. Parent self-loop means root; `size` is meaningful for roots
/// (current subtree size) and keeps its frozen link-time value for
/// non-roots; `rank` is used by the by-rank variant only.
pub struct DsuState {
    n: usize,
    parent: Vec<u32>,
    size: Vec<u64>,
    rank: Vec<u32>,
    variant: Variant,
    op_clock: u64,
    observer: Option<Observer>,
}

impl std::fmt::Debug for DsuState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DsuState")
            .field("n", &self.n)
            .field("parent", &self.parent)
            .field("size", &self.size)
            .field("rank", &self.rank)
            .field("variant", &self.variant)
            .field("op_clock", &self.op_clock)
            .field("observer", &self.observer.is_some())
            .finish()
    }
}

impl DsuState {
    pub fn new(n: usize, variant: Variant) -> Result<Self, DsuError> {
        if n == 0 {
            return Err(DsuError::EmptyDomain);
        }
        Ok(DsuState {
            n,
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            rank: vec![0; n],
            variant,
            op_clock: 0,
            observer: None,
        })
    }

    /// Builds a state with the given parent edges, for analysis-only
    /// shapes that union-by-size cannot produce organically. Sizes are set
    /// to the subtree sizes of the injected shape. Compression is on,
    /// linking by size.
    pub fn inject(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, DsuError> {
        if n == 0 {
            return Err(DsuError::EmptyDomain);
        }
        let mut parent: Vec<u32> = (0..n as u32).collect();
        let mut listed = vec![false; n];
        for &(node, par) in edges {
            for id in [node, par] {
                if id.index() >= n {
                    return Err(DsuError::InvalidNode { id: id.0, n });
                }
            }
            if listed[node.index()] {
                return Err(DsuError::DuplicateNode(node.0));
            }
            listed[node.index()] = true;
            parent[node.index()] = par.0;
        }
        // Cycle check: every chain must reach a self-loop within n steps.
        for start in 0..n {
            let mut cur = start;
            let mut budget = n;
            while parent[cur] as usize != cur {
                cur = parent[cur] as usize;
                if budget == 0 {
                    return Err(DsuError::CyclicForest(start as u32));
                }
                budget -= 1;
            }
        }
        // Subtree sizes by counting each node into all its ancestors.
        let mut size = vec![1u64; n];
        for start in 0..n {
            let mut cur = start;
            while parent[cur] as usize != cur {
                cur = parent[cur] as usize;
                size[cur] += 1;
            }
        }
        Ok(DsuState {
            n,
            parent,
            size,
            rank: vec![0; n],
            variant: Variant::SIZE_ON,
            op_clock: 0,
            observer: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn op_clock(&self) -> u64 {
        self.op_clock
    }

    pub fn parent_of(&self, p: NodeId) -> NodeId {
        NodeId(self.parent[p.index()])
    }

    /// Stored size (current for roots, frozen link-time value otherwise).
    pub fn size_of(&self, p: NodeId) -> u64 {
        self.size[p.index()]
    }

    pub fn rank_of(&self, p: NodeId) -> u32 {
        self.rank[p.index()]
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn sizes(&self) -> &[u64] {
        &self.size
    }

    pub fn is_root(&self, p: NodeId) -> bool {
        self.parent[p.index()] == p.0
    }

    /// Root lookup without mutation (no compression, no clock tick).
    pub fn root_of(&self, p: NodeId) -> Result<NodeId, DsuError> {
        self.check(p)?;
        let mut cur = p.0;
        let mut budget = self.n;
        while self.parent[cur as usize] != cur {
            cur = self.parent[cur as usize];
            assert!(budget > 0, "parent chain longer than n: cycle");
            budget -= 1;
        }
        Ok(NodeId(cur))
    }

    pub fn subscribe(&mut self, observer: Observer) -> Result<(), DsuError> {
        if self.observer.is_some() {
            return Err(DsuError::ObserverTaken);
        }
        self.observer = Some(observer);
        Ok(())
    }

    fn check(&self, p: NodeId) -> Result<(), DsuError> {
        if p.index() >= self.n {
            return Err(DsuError::InvalidNode { id: p.0, n: self.n });
        }
        Ok(())
    }

    fn emit(&mut self, event: DsuEvent) {
        if let Some(obs) = self.observer.as_mut() {
            obs(&event);
        }
    }

    pub fn find(&mut self, p: NodeId) -> Result<FindOutcome, DsuError> {
        self.check(p)?;
        self.op_clock += 1;
        let step = self.op_clock;
        let out = self.find_at(p, step, 0);
        self.emit(DsuEvent::StepBoundary { step });
        Ok(out)
    }

    /// Two-pass find: locate the root, then rewrite interior pointers.
    /// Final pointers are identical to the recursive formulation.
    fn find_at(&mut self, p: NodeId, step: u64, sub: u8) -> FindOutcome {
        let mut path = vec![p];
        let mut cur = p;
        while self.parent[cur.index()] != cur.0 {
            cur = NodeId(self.parent[cur.index()]);
            path.push(cur);
        }
        let root = cur;
        if self.variant.compression == Compression::On && path.len() > 2 {
            // Rewrite top-down (deepest ancestor first), matching the
            // order the recursion performs the assignments in.
            for j in (0..path.len() - 2).rev() {
                let node = path[j];
                let old = NodeId(self.parent[node.index()]);
                self.parent[node.index()] = root.0;
                self.emit(DsuEvent::Parent(ParentChangeEvent {
                    node,
                    old_parent: old,
                    new_parent: root,
                    cause: ChangeCause::Compression,
                    step,
                    sub,
                }));
            }
        }
        FindOutcome { root, path }
    }

    pub fn union(&mut self, a: NodeId, b: NodeId) -> Result<UnionOutcome, DsuError> {
        self.check(a)?;
        self.check(b)?;
        self.op_clock += 1;
        let step = self.op_clock;
        let find_a = self.find_at(a, step, 0);
        let find_b = self.find_at(b, step, 1);
        let (mut winner, mut loser) = (find_a.root, find_b.root);
        let outcome = if winner == loser {
            UnionOutcome {
                root: winner,
                merged: false,
                find_a,
                find_b,
            }
        } else {
            // Swap only on strict inequality: on ties the first argument's
            // root wins.
            let swap = match self.variant.link {
                LinkRule::BySize => self.size[winner.index()] < self.size[loser.index()],
                LinkRule::ByRank => self.rank[winner.index()] < self.rank[loser.index()],
            };
            if swap {
                std::mem::swap(&mut winner, &mut loser);
            }
            if self.variant.link == LinkRule::ByRank
                && self.rank[winner.index()] == self.rank[loser.index()]
            {
                self.rank[winner.index()] += 1;
            }
            self.parent[loser.index()] = winner.0;
            self.size[winner.index()] += self.size[loser.index()];
            self.emit(DsuEvent::Parent(ParentChangeEvent {
                node: loser,
                old_parent: loser,
                new_parent: winner,
                cause: ChangeCause::Union,
                step,
                sub: 2,
            }));
            UnionOutcome {
                root: winner,
                merged: true,
                find_a,
                find_b,
            }
        };
        self.emit(DsuEvent::StepBoundary { step });
        Ok(outcome)
    }

    /// Walks every parent chain with a step budget of `n`; panics on a
    /// cycle. Used by tests and the oracle layer.
    pub fn assert_acyclic(&self) {
        for p in 0..self.n {
            let mut cur = p;
            let mut budget = self.n;
            while self.parent[cur] as usize != cur {
                cur = self.parent[cur] as usize;
                assert!(budget > 0, "cycle through node {p}");
                budget -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::rc::Rc;

    fn id(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn initialize_all_roots() {
        let s = DsuState::new(4, Variant::SIZE_ON).unwrap();
        assert_eq!(s.parents(), &[0, 1, 2, 3]);
        assert_eq!(s.sizes(), &[1, 1, 1, 1]);
        assert_eq!(s.op_clock(), 0);

        let s = DsuState::new(1, Variant::SIZE_ON).unwrap();
        assert_eq!(s.parents(), &[0]);
        assert_eq!(s.sizes(), &[1]);
    }

    #[test]
    fn initialize_zero_rejected() {
        assert_eq!(
            DsuState::new(0, Variant::SIZE_ON).unwrap_err(),
            DsuError::EmptyDomain
        );
    }

    #[test]
    fn find_root_is_identity() {
        let mut s = DsuState::new(4, Variant::SIZE_ON).unwrap();
        let out = s.find(id(3)).unwrap();
        assert_eq!(out.root, id(3));
        assert_eq!(out.path, vec![id(3)]);
        assert_eq!(s.op_clock(), 1);
    }

    #[test]
    fn union_tie_break_first_argument_wins() {
        let mut s = DsuState::new(4, Variant::SIZE_ON).unwrap();
        let out = s.union(id(0), id(1)).unwrap();
        assert_eq!(out.root, id(0));
        assert!(out.merged);
        assert_eq!(s.parent_of(id(1)), id(0));
        assert_eq!(s.size_of(id(0)), 2);

        let out = s.union(id(1), id(0)).unwrap();
        assert!(!out.merged);
        assert_eq!(s.sizes(), &[2, 1, 1, 1]);
    }

    #[test]
    fn union_smaller_under_larger() {
        let mut s = DsuState::new(4, Variant::SIZE_ON).unwrap();
        s.union(id(0), id(1)).unwrap();
        let out = s.union(id(2), id(0)).unwrap();
        // size 2 beats 1 despite argument order
        assert_eq!(out.root, id(0));
        assert_eq!(s.parent_of(id(2)), id(0));
        assert_eq!(s.size_of(id(0)), 3);
    }

    #[test]
    fn compression_rewrites_and_path_shortens() {
        let mut s = DsuState::new(4, Variant::SIZE_ON).unwrap();
        s.union(id(0), id(1)).unwrap();
        s.union(id(2), id(3)).unwrap();
        s.union(id(0), id(2)).unwrap();
        let out = s.find(id(3)).unwrap();
        assert_eq!(out.root, id(0));
        assert_eq!(out.path, vec![id(3), id(2), id(0)]);
        assert_eq!(s.parent_of(id(3)), id(0));

        let again = s.find(id(3)).unwrap();
        assert_eq!(again.path, vec![id(3), id(0)]);
    }

    #[test]
    fn compress_off_leaves_pointers() {
        let mut s = DsuState::new(4, Variant::SIZE_OFF).unwrap();
        s.union(id(0), id(1)).unwrap();
        s.union(id(2), id(3)).unwrap();
        s.union(id(0), id(2)).unwrap();
        let out = s.find(id(3)).unwrap();
        assert_eq!(out.path, vec![id(3), id(2), id(0)]);
        assert_eq!(s.parent_of(id(3)), id(2));
        let again = s.find(id(3)).unwrap();
        assert_eq!(again.path, vec![id(3), id(2), id(0)]);
    }

    #[test]
    fn by_rank_invariant() {
        let mut s = DsuState::new(8, Variant::RANK_ON).unwrap();
        s.union(id(0), id(1)).unwrap();
        assert_eq!(s.rank_of(id(0)), 1);
        s.union(id(2), id(3)).unwrap();
        s.union(id(0), id(2)).unwrap();
        s.union(id(4), id(0)).unwrap();
        for p in 0..8 {
            let p = id(p);
            if !s.is_root(p) {
                assert!(s.rank_of(s.parent_of(p)) > s.rank_of(p));
            }
        }
    }

    #[test]
    fn observer_sees_events_in_order() {
        let log: Rc<RefCell<Vec<String>>> = Rc::default();
        let sink = log.clone();
        let mut s = DsuState::new(4, Variant::SIZE_ON).unwrap();
        s.subscribe(Box::new(move |ev| {
            let line = match ev {
                DsuEvent::Parent(e) => format!(
                    "{:?} {}:{}->{}",
                    e.cause, e.node, e.old_parent, e.new_parent
                ),
                DsuEvent::StepBoundary { step } => format!("step {step}"),
            };
            sink.borrow_mut().push(line);
        }))
        .unwrap();
        assert_eq!(
            s.subscribe(Box::new(|_| {})).unwrap_err(),
            DsuError::ObserverTaken
        );

        s.union(id(0), id(1)).unwrap();
        assert_eq!(
            log.borrow().as_slice(),
            &["Union 1:1->0".to_string(), "step 1".to_string()]
        );
        log.borrow_mut().clear();

        s.union(id(2), id(3)).unwrap();
        s.union(id(0), id(2)).unwrap();
        log.borrow_mut().clear();
        s.find(id(3)).unwrap();
        assert_eq!(
            log.borrow().as_slice(),
            &["Compression 3:2->0".to_string(), "step 4".to_string()]
        );
        log.borrow_mut().clear();

        // find on a root: zero rewrites
        s.find(id(0)).unwrap();
        assert_eq!(log.borrow().as_slice(), &["step 5".to_string()]);
    }

    #[test]
    fn invalid_node_rejected() {
        let mut s = DsuState::new(2, Variant::SIZE_ON).unwrap();
        assert!(matches!(
            s.find(id(2)).unwrap_err(),
            DsuError::InvalidNode { id: 2, n: 2 }
        ));
        assert!(s.union(id(0), id(5)).is_err());
    }

    #[test]
    fn inject_examples() {
        // chain 0 <- 1 <- 2
        let s = DsuState::inject(3, &[(id(1), id(0)), (id(2), id(1))]).unwrap();
        assert_eq!(s.sizes(), &[3, 2, 1]);
        // empty spec: singletons
        let s = DsuState::inject(3, &[]).unwrap();
        assert_eq!(s.sizes(), &[1, 1, 1]);
        // cycle rejected
        assert!(matches!(
            DsuState::inject(2, &[(id(0), id(1)), (id(1), id(0))]).unwrap_err(),
            DsuError::CyclicForest(_)
        ));
        // duplicate rejected
        assert_eq!(
            DsuState::inject(3, &[(id(1), id(0)), (id(1), id(2))]).unwrap_err(),
            DsuError::DuplicateNode(1)
        );
    }

    #[test]
    fn acyclic_after_random_ops() {
        let mut s = DsuState::new(64, Variant::SIZE_ON).unwrap();
        let mut rng = crate::rng::SplitMix64::new(7);
        for _ in 0..500 {
            let a = id(rng.next_below(64) as u32);
            let b = id(rng.next_below(64) as u32);
            if rng.next_u64() % 2 == 0 {
                s.union(a, b).unwrap();
            } else {
                s.find(a).unwrap();
            }
            s.assert_acyclic();
        }
    }
}
