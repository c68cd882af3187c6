//! Potential functions over the instrumented forest and the per-find /
//! per-run amortized accounting with explicit constants.
//!
//! Five kinds:
//!
//! * `Sqrt` — sqrt of the current size.
//! * `LogSq` — current size over `(3 + log2 size)^2`.
//! * `Level(j)` — `sqrt(size_max(p)) * sum_{i<j} 1/(1 + loghat_i(size_max(parent)))`,
//!   where `loghat_0` is plain `log2` and higher levels are the modified
//!   iterated functions. `Level(1)` and `Level(2)` carry accounting
//!   constants; higher levels are evaluated but not bounded.
//! * `Ack` — the Ackermann-indicator double sum over the rank proxy
//!   `r(p) = floor(log2 size_max(p))`.
//!
//! Every asymptotic claim is pinned to an explicit constant in
//! [`Constants`]; the per-find inequalities are checked find by find, the
//! per-run increase caps at the end of the run.

use crate::ackfn::{ackermann, alpha, loghat, loghat_star, log_star, SatInt};
use crate::dsu::NodeId;
use crate::instrument::ViolationLog;
use serde::Serialize;
use std::f64::consts::PI;

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PotentialKind {
    Sqrt,
    LogSq,
    Level(u32),
    Ack,
}

impl PotentialKind {
    pub const DEFAULT: [PotentialKind; 5] = [
        PotentialKind::Sqrt,
        PotentialKind::LogSq,
        PotentialKind::Level(1),
        PotentialKind::Level(2),
        PotentialKind::Ack,
    ];

    pub fn name(&self) -> String {
        match self {
            PotentialKind::Sqrt => "sqrt".into(),
            PotentialKind::LogSq => "logsq".into(),
            PotentialKind::Level(j) => format!("level{j}"),
            PotentialKind::Ack => "ack".into(),
        }
    }
}

impl std::fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for PotentialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sqrt" => Ok(PotentialKind::Sqrt),
            "logsq" => Ok(PotentialKind::LogSq),
            "ack" => Ok(PotentialKind::Ack),
            _ => {
                if let Some(j) = s.strip_prefix("level") {
                    let j: u32 = j.parse().map_err(|_| format!("bad level in {s:?}"))?;
                    if j == 0 {
                        return Err("level potentials start at 1".into());
                    }
                    Ok(PotentialKind::Level(j))
                } else {
                    Err(format!("unknown potential kind {s:?}"))
                }
            }
        }
    }
}

/// Accounting constants. Multipliers scale the potential decrease in the
/// per-find inequality `path_edges <= mult * dPhi + additive(n)`; the
/// `c_*` values cap the total potential increase over all union steps at
/// `c * n`.
#[derive(Clone, Debug, Serialize)]
pub struct Constants {
    pub sqrt_mult: f64,
    pub logsq_mult: f64,
    pub level_mult: f64,
    pub ack_mult: f64,
    pub c_sqrt: f64,
    pub c_logsq: f64,
    pub c_level_per_term: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            sqrt_mult: 2.0,
            logsq_mult: 270.0,
            level_mult: (1u64 << 13) as f64,
            ack_mult: 1.0,
            // sum of sqrt(size_max) <= n * sum 2^{-i/2} = n / (1 - 1/sqrt 2)
            c_sqrt: 3.5,
            // charging argument: each node receives at most sum 1/(1+i)^2
            c_logsq: PI * PI / 6.0,
            // each of the j terms is at most 1, so the sqrt cap per term
            c_level_per_term: 3.5,
        }
    }
}

impl Constants {
    pub fn mult(&self, kind: PotentialKind) -> f64 {
        match kind {
            PotentialKind::Sqrt => self.sqrt_mult,
            PotentialKind::LogSq => self.logsq_mult,
            PotentialKind::Level(_) => self.level_mult,
            PotentialKind::Ack => self.ack_mult,
        }
    }

    /// Additive term of the per-find inequality.
    pub fn additive(&self, kind: PotentialKind, n: u64) -> Option<f64> {
        let nf = n as f64;
        match kind {
            PotentialKind::Sqrt => Some((nf.max(4.0)).log2().log2() + 3.0),
            PotentialKind::LogSq => Some(2.0 * log_star(nf) as f64 + 8.0),
            PotentialKind::Level(1) => Some(loghat_star(nf) as f64 + 2.0),
            PotentialKind::Level(2) => Some(loghat(2, nf) as f64 + 4.0),
            PotentialKind::Level(_) => None, // no pinned constants
            PotentialKind::Ack => Some(alpha(n) as f64 + 2.0),
        }
    }

    /// Cap on uncovered-event counts per find.
    pub fn event_cap(&self, kind: PotentialKind, n: u64) -> Option<f64> {
        let nf = n as f64;
        match kind {
            PotentialKind::Sqrt => Some((nf.max(4.0)).log2().log2() + 2.0),
            PotentialKind::LogSq => None,
            PotentialKind::Level(1) => Some(loghat_star(nf) as f64 + 1.0),
            PotentialKind::Level(2) => Some(loghat(2, nf) as f64 + 1.0),
            PotentialKind::Level(_) => None,
            PotentialKind::Ack => Some(alpha(n) as f64 + 1.0),
        }
    }

    /// Cap on the total potential increase over all union steps: `C * n`.
    pub fn run_cap(&self, kind: PotentialKind, n: u64) -> Option<f64> {
        let nf = n as f64;
        match kind {
            PotentialKind::Sqrt => Some(self.c_sqrt * nf),
            PotentialKind::LogSq => Some(self.c_logsq * nf),
            PotentialKind::Level(j) if j <= 2 => Some(self.c_level_per_term * j as f64 * nf),
            PotentialKind::Level(_) => None,
            PotentialKind::Ack => {
                Some((alpha(n) as f64 + 1.0) * (nf.log2() + 1.0) * nf)
            }
        }
    }
}

/// `sqrt(current size)`.
pub fn phi_sqrt(cur_size: u64) -> f64 {
    (cur_size as f64).sqrt()
}

/// `size / (3 + log2 size)^2`.
pub fn phi_logsq(cur_size: u64) -> f64 {
    let s = cur_size as f64;
    s / (3.0 + s.log2()).powi(2)
}

/// Level-`j` potential of a non-root node.
pub fn phi_level(j: u32, size_max: u64, parent_size_max: u64) -> f64 {
    let p = parent_size_max as f64;
    let mut sum = 0.0;
    for i in 0..j {
        let denom = if i == 0 { p.log2() } else { loghat(i, p) as f64 };
        sum += 1.0 / (1.0 + denom);
    }
    (size_max as f64).sqrt() * sum
}

/// Ackermann-indicator potential:
/// `sum_{k<=alpha(n)} sum_{l=1}^{r(p)} 1( A_k^{(l+1)}(r(p)) > r(parent) )`,
/// evaluated with saturating iterates and early exit once an iterate
/// exceeds `r(parent)` (the indicator is monotone in `l`).
pub fn phi_ack(r_p: u32, r_parent: u32, alpha_n: u32) -> u64 {
    let mut total = 0u64;
    for k in 0..=alpha_n {
        let mut v = ackermann(k, r_p as u64);
        let mut l_ok = 0u64;
        for _l in 1..=r_p as u64 {
            v = ack_apply(k, v);
            if v <= r_parent as u64 {
                l_ok += 1;
            } else {
                break;
            }
        }
        total += r_p as u64 - l_ok;
    }
    total
}

fn ack_apply(k: u32, v: SatInt) -> SatInt {
    match v.exact() {
        Some(x) => ackermann(k, x),
        None => v,
    }
}

/// Per-edge Ackermann diagnostics: `k` is the largest level with
/// `A_k(r_p) <= r_parent`, `l` the largest iterate count with
/// `A_k^{(l)}(r_p) <= r_parent`. Requires `r_parent >= r_p + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AckEdge {
    pub k: u32,
    pub l: u32,
}

pub fn ack_edge(r_p: u32, r_parent: u32) -> AckEdge {
    debug_assert!(r_parent >= r_p + 1, "A_0 well-definedness violated");
    let mut k = 0;
    while ackermann(k + 1, r_p as u64) <= r_parent as u64 {
        k += 1;
    }
    let mut l = 1;
    let mut v = ackermann(k, r_p as u64);
    loop {
        v = ack_apply(k, v);
        if v <= r_parent as u64 {
            l += 1;
        } else {
            break;
        }
    }
    AckEdge { k, l }
}

/// Everything the accounting needs to know about one find: the path
/// (root last), current sizes along it before compression, and the static
/// max-sizes. `compressed` is true when pointers were actually rewritten.
#[derive(Clone, Debug)]
pub struct PathSnapshot {
    pub step: u64,
    pub sub: u8,
    pub nodes: Vec<NodeId>,
    pub cur_before: Vec<u64>,
    pub size_max: Vec<u64>,
    pub compressed: bool,
}

impl PathSnapshot {
    fn edges(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Current sizes after the compression this snapshot describes.
    fn cur_after(&self) -> Vec<u64> {
        let mut after = self.cur_before.clone();
        if self.compressed {
            for j in 1..self.edges() {
                after[j] -= self.cur_before[j - 1];
            }
        }
        after
    }
}

/// Context for the potential increase caused by one union link.
#[derive(Clone, Debug)]
pub struct LinkSnapshot {
    pub step: u64,
    pub loser_cur: u64,
    pub loser_size_max: u64,
    pub winner_size_max_before: u64,
    pub winner_size_max_after: u64,
    /// Max-sizes of the winner's previous children, whose potential may
    /// only move down when the winner grows.
    pub children_size_max: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KindFindStats {
    pub delta_phi: f64,
    pub events: u32,
    pub verdict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FindRow {
    pub step: u64,
    pub sub: u8,
    pub path_nodes: u32,
    pub path_edges: u32,
    pub per_kind: Vec<KindFindStats>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KindReport {
    pub kind: String,
    /// Total potential added by union links.
    pub union_increase_total: f64,
    /// `C_kind * n`, when the kind has pinned constants.
    pub run_cap: Option<f64>,
    pub increase_within_cap: bool,
    /// Total decrease over all finds (each find's decrease is >= 0).
    pub total_decrease: f64,
    pub monotonicity: ViolationLog,
    pub account_find: ViolationLog,
    pub event_cap: ViolationLog,
    /// Section-specific structural checks (derivative bound, dichotomy,
    /// event conditions, indicator group counts).
    pub structure: ViolationLog,
    pub max_amortized: f64,
    /// `total path edges <= mult * C * n + finds * additive(n)`.
    pub closed_form_ok: bool,
    pub pass: bool,
}

impl KindReport {
    fn compute_pass(&mut self) {
        self.pass = self.increase_within_cap
            && self.monotonicity.pass()
            && self.account_find.pass()
            && self.event_cap.pass()
            && self.structure.pass()
            && self.closed_form_ok;
    }
}

struct KindState {
    kind: PotentialKind,
    union_increase: f64,
    total_decrease: f64,
    monotonicity: ViolationLog,
    account_find: ViolationLog,
    event_cap: ViolationLog,
    structure: ViolationLog,
    max_amortized: f64,
}

impl KindState {
    fn new(kind: PotentialKind) -> Self {
        KindState {
            kind,
            union_increase: 0.0,
            total_decrease: 0.0,
            monotonicity: ViolationLog::default(),
            account_find: ViolationLog::default(),
            event_cap: ViolationLog::default(),
            structure: ViolationLog::default(),
            max_amortized: f64::NEG_INFINITY,
        }
    }
}

/// Accumulates per-find and per-run accounting over one trace execution.
/// Assumes an organic by-size run with compression on.
pub struct Accounting {
    constants: Constants,
    n: u64,
    alpha_n: u32,
    kinds: Vec<KindState>,
    finds_count: u64,
    total_edges: u64,
    /// Max-sizes strictly double along every find path.
    pub path_growth: ViolationLog,
}

impl Accounting {
    pub fn new(kinds: &[PotentialKind], constants: Constants, n: u64) -> Self {
        Accounting {
            constants,
            n,
            alpha_n: alpha(n),
            kinds: kinds.iter().map(|&k| KindState::new(k)).collect(),
            finds_count: 0,
            total_edges: 0,
            path_growth: ViolationLog::default(),
        }
    }

    pub fn kinds(&self) -> Vec<PotentialKind> {
        self.kinds.iter().map(|k| k.kind).collect()
    }

    pub fn alpha_n(&self) -> u32 {
        self.alpha_n
    }

    /// Violations recorded so far, for fail-fast runs.
    pub fn violation_count(&self) -> u64 {
        self.path_growth.count
            + self
                .kinds
                .iter()
                .map(|k| {
                    k.monotonicity.count
                        + k.account_find.count
                        + k.event_cap.count
                        + k.structure.count
                })
                .sum::<u64>()
    }

    fn r_of(size_max: u64) -> u32 {
        size_max.ilog2()
    }

    /// Potential of a single non-root node under `kind`.
    pub fn phi(&self, kind: PotentialKind, cur_size: u64, size_max: u64, parent_size_max: u64) -> f64 {
        match kind {
            PotentialKind::Sqrt => phi_sqrt(cur_size),
            PotentialKind::LogSq => phi_logsq(cur_size),
            PotentialKind::Level(j) => phi_level(j, size_max, parent_size_max),
            PotentialKind::Ack => {
                phi_ack(Self::r_of(size_max), Self::r_of(parent_size_max), self.alpha_n) as f64
            }
        }
    }

    pub fn on_find(&mut self, snap: &PathSnapshot) -> FindRow {
        let edges = snap.edges();
        let step = snap.step;
        self.finds_count += 1;
        self.total_edges += edges as u64;
        let cur_after = snap.cur_after();

        // Geometric growth of max sizes along the path.
        for j in 0..edges {
            if snap.size_max[j + 1] < 2 * snap.size_max[j] {
                let (a, b) = (snap.size_max[j], snap.size_max[j + 1]);
                self.path_growth.record(|| {
                    format!("step {step}: size_max along path {a} -> {b} (< 2x)")
                });
            }
        }

        let root_smax = *snap.size_max.last().unwrap();
        let mut per_kind = Vec::with_capacity(self.kinds.len());
        for ks in &mut self.kinds {
            let kind = ks.kind;
            let mut delta = 0.0;
            let mut node_drops = Vec::with_capacity(edges);
            for j in 0..edges {
                let parent_before = snap.size_max[j + 1];
                let parent_after = if snap.compressed && j + 2 <= edges {
                    root_smax
                } else {
                    parent_before
                };
                let before = match kind {
                    PotentialKind::Sqrt => phi_sqrt(snap.cur_before[j]),
                    PotentialKind::LogSq => phi_logsq(snap.cur_before[j]),
                    PotentialKind::Level(lvl) => phi_level(lvl, snap.size_max[j], parent_before),
                    PotentialKind::Ack => phi_ack(
                        Self::r_of(snap.size_max[j]),
                        Self::r_of(parent_before),
                        self.alpha_n,
                    ) as f64,
                };
                let after = match kind {
                    PotentialKind::Sqrt => phi_sqrt(cur_after[j]),
                    PotentialKind::LogSq => phi_logsq(cur_after[j]),
                    PotentialKind::Level(lvl) => phi_level(lvl, snap.size_max[j], parent_after),
                    PotentialKind::Ack => phi_ack(
                        Self::r_of(snap.size_max[j]),
                        Self::r_of(parent_after),
                        self.alpha_n,
                    ) as f64,
                };
                let drop = before - after;
                if drop < -TOL {
                    let node = snap.nodes[j];
                    ks.monotonicity.record(|| {
                        format!("step {step}: {kind} potential of {node} rose by {}", -drop)
                    });
                }
                node_drops.push(drop);
                delta += drop;
            }

            let events = Self::structural_checks(
                ks,
                &self.constants,
                self.alpha_n,
                snap,
                &cur_after,
                &node_drops,
            );
            if let Some(cap) = self.constants.event_cap(kind, self.n) {
                if events as f64 > cap + TOL {
                    ks.event_cap.record(|| {
                        format!("step {step}: {kind} uncovered events {events} > cap {cap}")
                    });
                }
            }

            let verdict = match self.constants.additive(kind, self.n) {
                Some(add) => {
                    let rhs = self.constants.mult(kind) * delta + add;
                    let ok = edges as f64 <= rhs + TOL;
                    if !ok {
                        ks.account_find.record(|| {
                            format!(
                                "step {step}: {kind} path_edges {edges} > {} * {delta} + {add}",
                                self.constants.mult(kind)
                            )
                        });
                    }
                    ok
                }
                None => true,
            };
            let amortized = edges as f64 - self.constants.mult(kind) * delta;
            if amortized > ks.max_amortized {
                ks.max_amortized = amortized;
            }
            ks.total_decrease += delta;
            per_kind.push(KindFindStats {
                delta_phi: delta,
                events,
                verdict,
            });
        }

        FindRow {
            step,
            sub: snap.sub,
            path_nodes: snap.nodes.len() as u32,
            path_edges: edges as u32,
            per_kind,
        }
    }

    /// Section-specific per-find checks; returns the uncovered-event count.
    fn structural_checks(
        ks: &mut KindState,
        constants: &Constants,
        alpha_n: u32,
        snap: &PathSnapshot,
        cur_after: &[u64],
        node_drops: &[f64],
    ) -> u32 {
        let edges = snap.edges();
        let step = snap.step;
        let root_smax = *snap.size_max.last().unwrap();
        match ks.kind {
            PotentialKind::Sqrt => {
                // Per shrinking edge: either the potential drop covers the
                // edge, or the log of the size doubles.
                let mut events = 0;
                if !snap.compressed {
                    return 0;
                }
                for j in 1..edges {
                    let drop = phi_sqrt(snap.cur_before[j]) - phi_sqrt(cur_after[j]);
                    if drop < 0.5 {
                        events += 1;
                        let (lo, hi) = (snap.cur_before[j - 1], snap.cur_before[j]);
                        if (hi as f64).log2() < 2.0 * (lo as f64).log2() - TOL {
                            ks.structure.record(|| {
                                format!(
                                    "step {step}: sqrt dichotomy fails at sizes {lo} -> {hi}"
                                )
                            });
                        }
                    }
                }
                events
            }
            PotentialKind::LogSq => {
                // Derivative lower bound: shrinking from s by d drops the
                // potential by at least d / (30 (3 + log2 s)^2).
                let mut events = 0;
                if !snap.compressed {
                    return 0;
                }
                for j in 1..edges {
                    let s = snap.cur_before[j];
                    let d = snap.cur_before[j - 1];
                    let drop = phi_logsq(s) - phi_logsq(cur_after[j]);
                    let floor = d as f64 / (30.0 * (3.0 + (s as f64).log2()).powi(2));
                    if drop < floor - TOL {
                        ks.structure.record(|| {
                            format!(
                                "step {step}: logsq drop {drop} below derivative bound {floor} (s={s}, d={d})"
                            )
                        });
                    }
                    if drop < 1.0 / 270.0 {
                        events += 1;
                    }
                }
                events
            }
            PotentialKind::Level(1) => {
                let mut events = 0;
                if !snap.compressed {
                    return 0;
                }
                for j in 0..edges.saturating_sub(1) {
                    if node_drops[j] < constants.level_mult.recip() {
                        events += 1;
                        let s = snap.size_max[j] as f64;
                        let bound = ((1.0 + (snap.size_max[j + 1] as f64).log2()) / 8.0).powi(4);
                        if s > bound + TOL {
                            ks.structure.record(|| {
                                format!(
                                    "step {step}: level1 uncovered edge without event condition (s={s}, bound={bound})"
                                )
                            });
                        }
                    }
                }
                events
            }
            PotentialKind::Level(2) => {
                // Edges uncovered by the first term satisfy the level-1
                // event condition; among those, where the second term also
                // fails to pay, the level-2 event condition must hold.
                let mut events = 0;
                if !snap.compressed {
                    return 0;
                }
                for j in 1..edges.saturating_sub(1) {
                    let first_term_drop = phi_level(1, snap.size_max[j], snap.size_max[j + 1])
                        - phi_level(1, snap.size_max[j], root_smax);
                    if first_term_drop >= constants.level_mult.recip() {
                        continue;
                    }
                    let hat_i = loghat_star(snap.size_max[j] as f64) as f64;
                    let hat_m = loghat_star(root_smax as f64) as f64;
                    let second_drop =
                        (snap.size_max[j - 1] as f64).sqrt() * (1.0 / (1.0 + hat_i) - 1.0 / (1.0 + hat_m));
                    if second_drop < constants.level_mult.recip() {
                        events += 1;
                        let s = snap.size_max[j - 1] as f64;
                        let bound = ((1.0 + loghat_star(snap.size_max[j] as f64) as f64) / 8.0).powi(4);
                        if s > bound + TOL {
                            ks.structure.record(|| {
                                format!(
                                    "step {step}: level2 uncovered edge without event condition (s={s}, bound={bound})"
                                )
                            });
                        }
                    }
                }
                events
            }
            PotentialKind::Level(_) => 0,
            PotentialKind::Ack => {
                // Edge diagnostics plus the per-level group claim: for each
                // k at most one node with k_i = k fails to lose a unit.
                // Nodes with r = 0 carry zero potential and cannot lose a
                // unit; at most one exists per path (max sizes double), so
                // the per-find bound absorbs it and we keep it out of the
                // group counting.
                let mut failing_groups: std::collections::BTreeMap<u32, u32> = Default::default();
                for j in 0..edges {
                    let r_p = Self::r_of(snap.size_max[j]);
                    let r_q = Self::r_of(snap.size_max[j + 1]);
                    if r_q < r_p + 1 {
                        ks.structure.record(|| {
                            format!("step {step}: ack edge not well-defined (r {r_p} -> {r_q})")
                        });
                        continue;
                    }
                    let edge = ack_edge(r_p, r_q);
                    if edge.k > alpha_n {
                        ks.structure.record(|| {
                            format!("step {step}: k_i = {} exceeds alpha(n) = {alpha_n}", edge.k)
                        });
                    }
                    if r_p >= 1 && edge.l > r_p {
                        ks.structure.record(|| {
                            format!("step {step}: l_i = {} exceeds r(p) = {r_p}", edge.l)
                        });
                    }
                    if snap.compressed && r_p >= 1 && node_drops[j] < 1.0 - TOL {
                        *failing_groups.entry(edge.k).or_insert(0) += 1;
                    }
                }
                if snap.compressed {
                    for (&k, &count) in &failing_groups {
                        if count > 1 {
                            ks.structure.record(|| {
                                format!(
                                    "step {step}: {count} nodes with k_i = {k} failed to drop a unit"
                                )
                            });
                        }
                    }
                }
                failing_groups.len() as u32
            }
        }
    }

    pub fn on_link(&mut self, snap: &LinkSnapshot) {
        let step = snap.step;
        let alpha_n = self.alpha_n;
        for ks in &mut self.kinds {
            let kind = ks.kind;
            let phi_new = match kind {
                PotentialKind::Sqrt => phi_sqrt(snap.loser_cur),
                PotentialKind::LogSq => phi_logsq(snap.loser_cur),
                PotentialKind::Level(j) => {
                    phi_level(j, snap.loser_size_max, snap.winner_size_max_after)
                }
                PotentialKind::Ack => phi_ack(
                    Self::r_of(snap.loser_size_max),
                    Self::r_of(snap.winner_size_max_after),
                    alpha_n,
                ) as f64,
            };
            ks.union_increase += phi_new;

            // Ack boundedness: phi <= (alpha(n) + 1) * r(p).
            if kind == PotentialKind::Ack {
                let r = Self::r_of(snap.loser_size_max) as f64;
                if phi_new > (alpha_n as f64 + 1.0) * r + TOL {
                    ks.structure.record(|| {
                        format!("step {step}: ack potential {phi_new} exceeds (alpha+1)*r = {r}")
                    });
                }
            }

            // The winner's existing children may only move down as the
            // winner's max size grows.
            if matches!(kind, PotentialKind::Level(_) | PotentialKind::Ack) {
                for &child_smax in &snap.children_size_max {
                    let before = match kind {
                        PotentialKind::Level(j) => {
                            phi_level(j, child_smax, snap.winner_size_max_before)
                        }
                        _ => phi_ack(
                            Self::r_of(child_smax),
                            Self::r_of(snap.winner_size_max_before),
                            alpha_n,
                        ) as f64,
                    };
                    let after = match kind {
                        PotentialKind::Level(j) => {
                            phi_level(j, child_smax, snap.winner_size_max_after)
                        }
                        _ => phi_ack(
                            Self::r_of(child_smax),
                            Self::r_of(snap.winner_size_max_after),
                            alpha_n,
                        ) as f64,
                    };
                    if after > before + TOL {
                        ks.monotonicity.record(|| {
                            format!(
                                "step {step}: {kind} potential of a winner child rose {before} -> {after}"
                            )
                        });
                    }
                }
            }
        }
    }

    pub fn finish(self) -> (Vec<KindReport>, ViolationLog) {
        let Accounting {
            constants,
            n,
            kinds,
            finds_count,
            total_edges,
            path_growth,
            ..
        } = self;
        let reports = kinds
            .into_iter()
            .map(|ks| {
                let run_cap = constants.run_cap(ks.kind, n);
                let increase_within_cap = match run_cap {
                    Some(cap) => ks.union_increase <= cap + TOL,
                    None => true,
                };
                // Assemble the whole-run closed form: every find's edges
                // are paid by mult * (total decrease, itself at most the
                // total increase) plus the additive term per find.
                let closed_form_ok = match (run_cap, constants.additive(ks.kind, n)) {
                    (Some(cap), Some(add)) => {
                        let mult = constants.mult(ks.kind);
                        (total_edges as f64) <= mult * cap + finds_count as f64 * add + TOL
                    }
                    _ => true,
                };
                let mut report = KindReport {
                    kind: ks.kind.name(),
                    union_increase_total: ks.union_increase,
                    run_cap,
                    increase_within_cap,
                    total_decrease: ks.total_decrease,
                    monotonicity: ks.monotonicity,
                    account_find: ks.account_find,
                    event_cap: ks.event_cap,
                    structure: ks.structure,
                    max_amortized: ks.max_amortized,
                    closed_form_ok,
                    pass: false,
                };
                report.compute_pass();
                report
            })
            .collect();
        (reports, path_growth)
    }
}
