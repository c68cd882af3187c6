//! Online bookkeeping over a running forest: exact current sizes, running
//! max-sizes (frozen at link time), and step-by-step checks of the size
//! monotonicity and balance lemmas.
//!
//! Max size is the running maximum: equal to the current size while a node
//! is a root, frozen once it becomes a non-root. For non-roots this
//! coincides with the end-of-run "ever a descendant" count, which the
//! shadow oracle verifies at small `n`.

use crate::dsu::{LinkRule, NodeId};
use serde::Serialize;
use std::f64::consts::PI;

/// Pass/fail accumulator: counts violations, keeps a few counterexamples.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ViolationLog {
    pub count: u64,
    pub examples: Vec<String>,
}

impl ViolationLog {
    pub fn record(&mut self, msg: impl FnOnce() -> String) {
        self.count += 1;
        if self.examples.len() < 8 {
            self.examples.push(msg());
        }
    }

    pub fn pass(&self) -> bool {
        self.count == 0
    }
}

/// One node's size change over a step, for the monotonicity check.
#[derive(Clone, Copy, Debug)]
pub struct SizeChange {
    pub node: NodeId,
    pub root_before: bool,
    pub root_after: bool,
    pub before: u64,
    pub after: u64,
}

/// Roots must not shrink, non-roots must not grow.
pub fn check_lemma1(changes: &[SizeChange], step: u64, log: &mut ViolationLog) {
    for c in changes {
        if c.root_before && c.root_after && c.after < c.before {
            log.record(|| {
                format!(
                    "step {step}: root {} size decreased {} -> {}",
                    c.node, c.before, c.after
                )
            });
        }
        if !c.root_after && c.after > c.before {
            log.record(|| {
                format!(
                    "step {step}: non-root {} size increased {} -> {}",
                    c.node, c.before, c.after
                )
            });
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma4Report {
    pub charged_sum: f64,
    pub bound: f64,
    pub pass: bool,
    /// Per-node charge bucketed by floor(log2 size_max): (r, count, total charge).
    pub histogram: Vec<(u32, u64, f64)>,
}

/// The charge of one node: `size_max / (1 + log2 size_max)^2`.
pub fn lemma4_charge(size_max: u64) -> f64 {
    let s = size_max as f64;
    s / (1.0 + s.log2()).powi(2)
}

pub struct InstrumentState {
    n: usize,
    link_rule: LinkRule,
    /// Injected (analysis-only) states skip the balance checks that only
    /// organic states satisfy.
    analysis_only: bool,
    cur_size: Vec<u64>,
    size_max: Vec<u64>,
    is_root: Vec<bool>,
    parent: Vec<u32>,
    rank: Vec<u32>,
    children: Vec<Vec<u32>>,
    parent_size_max_seen: Vec<u64>,
    pub lemma1: ViolationLog,
    pub lemma2: ViolationLog,
    pub lemma3: ViolationLog,
    /// Union-by-size link relation: winner at least as large as loser.
    pub size_relation: ViolationLog,
}

impl InstrumentState {
    pub fn new(n: usize, link_rule: LinkRule) -> Self {
        InstrumentState {
            n,
            link_rule,
            analysis_only: false,
            cur_size: vec![1; n],
            size_max: vec![1; n],
            is_root: vec![true; n],
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            children: vec![Vec::new(); n],
            parent_size_max_seen: vec![0; n],
            lemma1: ViolationLog::default(),
            lemma2: ViolationLog::default(),
            lemma3: ViolationLog::default(),
            size_relation: ViolationLog::default(),
        }
    }

    /// Mirrors an injected forest; sizes and max-sizes start at the
    /// injected subtree sizes, and the balance checks are disabled.
    pub fn from_injected(n: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let mut st = InstrumentState::new(n, LinkRule::BySize);
        st.analysis_only = true;
        for &(node, par) in edges {
            st.parent[node.index()] = par.0;
            st.is_root[node.index()] = false;
            st.children[par.index()].push(node.0);
        }
        for start in 0..n {
            let mut cur = start;
            while st.parent[cur] as usize != cur {
                cur = st.parent[cur] as usize;
                st.cur_size[cur] += 1;
            }
        }
        st.size_max.copy_from_slice(&st.cur_size);
        for p in 0..n {
            if !st.is_root[p] {
                st.parent_size_max_seen[p] = st.size_max[st.parent[p] as usize];
            }
        }
        st
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn analysis_only(&self) -> bool {
        self.analysis_only
    }

    pub fn cur_size(&self, p: NodeId) -> u64 {
        self.cur_size[p.index()]
    }

    pub fn size_max(&self, p: NodeId) -> u64 {
        self.size_max[p.index()]
    }

    pub fn size_max_slice(&self) -> &[u64] {
        &self.size_max
    }

    pub fn is_root(&self, p: NodeId) -> bool {
        self.is_root[p.index()]
    }

    pub fn children(&self, p: NodeId) -> &[u32] {
        &self.children[p.index()]
    }

    /// Rank proxy: floor(log2 size_max) under by-size, the tracked rank
    /// under by-rank.
    pub fn r(&self, p: NodeId) -> u32 {
        match self.link_rule {
            LinkRule::BySize => self.size_max[p.index()].ilog2(),
            LinkRule::ByRank => self.rank[p.index()],
        }
    }

    fn check_reparent(&mut self, node: NodeId, new_parent: NodeId, step: u64) {
        let p = node.index();
        let q = new_parent.index();
        let pmax = self.size_max[q];
        // Lemma 2: the parent's max-size never decreases across rewrites.
        if pmax < self.parent_size_max_seen[p] {
            let seen = self.parent_size_max_seen[p];
            self.lemma2.record(|| {
                format!(
                    "step {step}: node {node} parent size_max dropped {seen} -> {pmax}"
                )
            });
        }
        self.parent_size_max_seen[p] = pmax;
        if self.analysis_only {
            return;
        }
        // Lemma 3: geometric decrease down the tree (rank gap under by-rank).
        match self.link_rule {
            LinkRule::BySize => {
                let smax = self.size_max[p];
                if pmax < 2 * smax {
                    self.lemma3.record(|| {
                        format!(
                            "step {step}: node {node} size_max {smax}, parent {new_parent} size_max {pmax} < 2x"
                        )
                    });
                }
            }
            LinkRule::ByRank => {
                let (rp, rq) = (self.rank[p], self.rank[q]);
                if rq < rp + 1 {
                    self.lemma3.record(|| {
                        format!("step {step}: node {node} rank {rp}, parent rank {rq}")
                    });
                }
            }
        }
    }

    /// Applies a compressed find along `path` (root last). Returns the
    /// current sizes along the path before the compression. `compressed`
    /// is false under the no-compression variant, in which case nothing
    /// changes.
    pub fn apply_find(&mut self, path: &[NodeId], compressed: bool, step: u64) -> Vec<u64> {
        let sizes_before: Vec<u64> = path.iter().map(|&q| self.cur_size[q.index()]).collect();
        let edges = path.len() - 1;
        if !compressed || edges < 2 {
            return sizes_before;
        }
        let root = *path.last().unwrap();
        // Interior nodes lose the subtree hanging below them on the path.
        let mut changes = Vec::with_capacity(edges);
        for j in 1..edges {
            let q = path[j].index();
            let before = self.cur_size[q];
            self.cur_size[q] -= sizes_before[j - 1];
            changes.push(SizeChange {
                node: path[j],
                root_before: false,
                root_after: false,
                before,
                after: self.cur_size[q],
            });
        }
        check_lemma1(&changes, step, &mut self.lemma1);
        // Rewire mirrors and run the per-rewrite checks.
        for j in 0..edges - 1 {
            let node = path[j];
            let old_parent = path[j + 1];
            let kids = &mut self.children[old_parent.index()];
            if let Some(pos) = kids.iter().position(|&c| c == node.0) {
                kids.swap_remove(pos);
            }
            self.children[root.index()].push(node.0);
            self.parent[node.index()] = root.0;
            self.check_reparent(node, root, step);
        }
        sizes_before
    }

    /// Applies a union link of `loser` under `winner` (both roots).
    pub fn apply_link(&mut self, loser: NodeId, winner: NodeId, new_rank: u32, step: u64) {
        let (l, w) = (loser.index(), winner.index());
        debug_assert!(self.is_root[l] && self.is_root[w]);
        if self.link_rule == LinkRule::BySize && self.cur_size[w] < self.cur_size[l] {
            let (sw, sl) = (self.cur_size[w], self.cur_size[l]);
            self.size_relation.record(|| {
                format!("step {step}: winner {winner} size {sw} < loser {loser} size {sl}")
            });
        }
        self.cur_size[w] += self.cur_size[l];
        self.size_max[w] = self.size_max[w].max(self.cur_size[w]);
        self.rank[w] = new_rank;
        self.is_root[l] = false;
        self.parent[l] = winner.0;
        self.children[w].push(loser.0);
        self.check_reparent(loser, winner, step);
    }

    /// Final charged-sum check: `sum size_max/(1+log2 size_max)^2` against
    /// `(pi^2/6) n`, with the per-node charge histogram.
    pub fn check_lemma4(&self) -> Lemma4Report {
        let mut charged_sum = 0.0;
        let mut hist: std::collections::BTreeMap<u32, (u64, f64)> = Default::default();
        for p in 0..self.n {
            let charge = lemma4_charge(self.size_max[p]);
            charged_sum += charge;
            let bucket = hist.entry(self.size_max[p].ilog2()).or_insert((0, 0.0));
            bucket.0 += 1;
            bucket.1 += charge;
        }
        let bound = PI * PI / 6.0 * self.n as f64;
        Lemma4Report {
            charged_sum,
            bound,
            pass: charged_sum <= bound,
            histogram: hist.into_iter().map(|(r, (c, t))| (r, c, t)).collect(),
        }
    }
}
