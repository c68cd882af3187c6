//! Trace format and workload generators.
//!
//! A trace is a line-oriented text file:
//!
//! ```text
//! # comment
//! n 8
//! p 1 0        # optional prelude: inject edge child -> parent
//! u 0 1
//! f 3
//! ```
//!
//! The `n` line comes first; `p` lines (injected forest edges) must precede
//! all operations. Node ids are decimal and must be below `n`.

use crate::dsu::NodeId;
use crate::rng::SplitMix64;
use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Union(NodeId, NodeId),
    Find(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub n: u32,
    /// Injected forest edges `(child, parent)`, applied before any ops.
    pub prelude: Vec<(NodeId, NodeId)>,
    pub ops: Vec<Op>,
    /// Free-form provenance string echoed into reports.
    pub origin: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: expected `n <count>` before any other directive")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed directive {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: node id {id} out of range for n = {n}")]
    NodeOutOfRange { line: usize, id: u64, n: u32 },
    #[error("line {line}: prelude edge after first operation")]
    LatePrelude { line: usize },
    #[error("line {line}: duplicate or cyclic prelude edge")]
    BadPrelude { line: usize },
    #[error("line {line}: n must be positive")]
    ZeroN { line: usize },
}

pub fn parse_trace(text: &str) -> Result<Trace, TraceError> {
    let mut n: Option<u32> = None;
    let mut prelude = Vec::new();
    let mut ops = Vec::new();
    // parent map for prelude validation
    let mut parent: Vec<Option<u32>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let text_line = raw.split('#').next().unwrap_or("").trim();
        if text_line.is_empty() {
            continue;
        }
        let mut parts = text_line.split_whitespace();
        let tag = parts.next().unwrap();
        let malformed = || TraceError::Malformed {
            line,
            text: raw.trim().to_string(),
        };
        let arg = |parts: &mut std::str::SplitWhitespace| -> Result<u64, TraceError> {
            parts
                .next()
                .and_then(|t| t.parse::<u64>().ok())
                .ok_or_else(malformed)
        };

        match tag {
            "n" => {
                if n.is_some() {
                    return Err(malformed());
                }
                let v = arg(&mut parts)?;
                if v == 0 {
                    return Err(TraceError::ZeroN { line });
                }
                if v > u32::MAX as u64 || parts.next().is_some() {
                    return Err(malformed());
                }
                n = Some(v as u32);
                parent = vec![None; v as usize];
            }
            "p" | "u" | "f" => {
                let n = n.ok_or(TraceError::MissingHeader { line })?;
                let check = |id: u64| -> Result<u32, TraceError> {
                    if id < n as u64 {
                        Ok(id as u32)
                    } else {
                        Err(TraceError::NodeOutOfRange { line, id, n })
                    }
                };
                match tag {
                    "p" => {
                        if !ops.is_empty() {
                            return Err(TraceError::LatePrelude { line });
                        }
                        let child = check(arg(&mut parts)?)?;
                        let par = check(arg(&mut parts)?)?;
                        if parts.next().is_some() {
                            return Err(malformed());
                        }
                        if child == par || parent[child as usize].is_some() {
                            return Err(TraceError::BadPrelude { line });
                        }
                        // walk up from `par`; reaching `child` means a cycle
                        let mut cursor = par;
                        loop {
                            if cursor == child {
                                return Err(TraceError::BadPrelude { line });
                            }
                            match parent[cursor as usize] {
                                Some(next) => cursor = next,
                                None => break,
                            }
                        }
                        parent[child as usize] = Some(par);
                        prelude.push((NodeId(child), NodeId(par)));
                    }
                    "u" => {
                        let a = check(arg(&mut parts)?)?;
                        let b = check(arg(&mut parts)?)?;
                        if parts.next().is_some() {
                            return Err(malformed());
                        }
                        ops.push(Op::Union(NodeId(a), NodeId(b)));
                    }
                    _ => {
                        let p = check(arg(&mut parts)?)?;
                        if parts.next().is_some() {
                            return Err(malformed());
                        }
                        ops.push(Op::Find(NodeId(p)));
                    }
                }
            }
            _ => return Err(malformed()),
        }
    }

    let n = n.ok_or(TraceError::MissingHeader { line: text.lines().count() + 1 })?;
    Ok(Trace {
        n,
        prelude,
        ops,
        origin: "parsed".into(),
    })
}

pub fn emit_trace(trace: &Trace) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", trace.n).unwrap();
    for &(child, parent) in &trace.prelude {
        writeln!(out, "p {} {}", child.0, parent.0).unwrap();
    }
    for op in &trace.ops {
        match op {
            Op::Union(a, b) => writeln!(out, "u {} {}", a.0, b.0).unwrap(),
            Op::Find(p) => writeln!(out, "f {}", p.0).unwrap(),
        }
    }
    out
}

/// Echoed into reports so runs are reproducible from the report alone.
#[derive(Clone, Debug, Serialize)]
pub struct TraceOrigin {
    pub origin: String,
    pub n: u32,
    pub ops: usize,
    pub prelude_edges: usize,
}

impl Trace {
    pub fn origin_summary(&self) -> TraceOrigin {
        TraceOrigin {
            origin: self.origin.clone(),
            n: self.n,
            ops: self.ops.len(),
            prelude_edges: self.prelude.len(),
        }
    }
}

/// Random mix of unions and finds: each step is a find with probability
/// `find_fraction`, otherwise a union of two uniform nodes.
pub fn gen_random(n: u32, m: usize, seed: u64, find_fraction: f64) -> Trace {
    assert!(n > 0);
    assert!((0.0..=1.0).contains(&find_fraction));
    let mut rng = SplitMix64::new(seed);
    let mut ops = Vec::with_capacity(m);
    for _ in 0..m {
        if rng.next_f64() < find_fraction {
            ops.push(Op::Find(NodeId(rng.next_below(n as u64) as u32)));
        } else {
            let a = rng.next_below(n as u64) as u32;
            let b = rng.next_below(n as u64) as u32;
            ops.push(Op::Union(NodeId(a), NodeId(b)));
        }
    }
    Trace {
        n,
        prelude: Vec::new(),
        ops,
        origin: format!("random n={n} m={m} seed={seed} find_fraction={find_fraction}"),
    }
}

/// Binomial-tree builder: `n = 2^k` nodes, merged level by level so that
/// node 0 roots a binomial tree of order `k`, then `finds_per_leaf` finds
/// of the deepest node `n - 1`, which sits at depth `k`.
pub fn gen_binomial(k: u32, finds_per_leaf: usize) -> Trace {
    let n = 1u32 << k;
    let mut ops = Vec::new();
    for level in 0..k {
        let stride = 1u32 << (level + 1);
        let half = 1u32 << level;
        let mut base = 0;
        while base < n {
            ops.push(Op::Union(NodeId(base), NodeId(base + half)));
            base += stride;
        }
    }
    for _ in 0..finds_per_leaf {
        ops.push(Op::Find(NodeId(n - 1)));
    }
    Trace {
        n,
        prelude: Vec::new(),
        ops,
        origin: format!("binomial k={k} finds_per_leaf={finds_per_leaf}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsu::{DsuState, Variant};
    use proptest::prelude::*;

    #[test]
    fn parses_the_basic_grammar() {
        let trace = parse_trace("# demo\nn 4\nu 0 1  # union\nu 2 3\nf 3\n").unwrap();
        assert_eq!(trace.n, 4);
        assert_eq!(
            trace.ops,
            vec![
                Op::Union(NodeId(0), NodeId(1)),
                Op::Union(NodeId(2), NodeId(3)),
                Op::Find(NodeId(3)),
            ]
        );
        assert!(trace.prelude.is_empty());
    }

    #[test]
    fn parses_prelude_edges() {
        let trace = parse_trace("n 3\np 1 0\np 2 1\nf 2\n").unwrap();
        assert_eq!(trace.prelude, vec![(NodeId(1), NodeId(0)), (NodeId(2), NodeId(1))]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            parse_trace("u 0 1\n"),
            Err(TraceError::MissingHeader { line: 1 })
        ));
        assert!(matches!(
            parse_trace("n 4\nq 1\n"),
            Err(TraceError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_trace("n 4\nf 4\n"),
            Err(TraceError::NodeOutOfRange { line: 2, id: 4, n: 4 })
        ));
        assert!(matches!(
            parse_trace("n 4\nu 0 1\np 2 3\n"),
            Err(TraceError::LatePrelude { line: 3 })
        ));
        assert!(matches!(
            parse_trace("n 3\np 1 0\np 0 1\n"),
            Err(TraceError::BadPrelude { line: 3 })
        ));
        assert!(matches!(parse_trace("n 0\n"), Err(TraceError::ZeroN { line: 1 })));
        assert!(matches!(
            parse_trace("n 4\nf 1 2\n"),
            Err(TraceError::Malformed { .. })
        ));
    }

    #[test]
    fn generator_is_deterministic() {
        let a = gen_random(100, 500, 42, 0.5);
        let b = gen_random(100, 500, 42, 0.5);
        assert_eq!(a, b);
        let c = gen_random(100, 500, 43, 0.5);
        assert_ne!(a.ops, c.ops);
    }

    #[test]
    fn find_fraction_is_respected() {
        let trace = gen_random(64, 10_000, 7, 0.3);
        let finds = trace.ops.iter().filter(|op| matches!(op, Op::Find(_))).count();
        let frac = finds as f64 / trace.ops.len() as f64;
        assert!((frac - 0.3).abs() < 0.02, "observed find fraction {frac}");
    }

    #[test]
    fn binomial_small_structure() {
        let trace = gen_binomial(2, 1);
        assert_eq!(trace.n, 4);
        assert_eq!(
            trace.ops,
            vec![
                Op::Union(NodeId(0), NodeId(1)),
                Op::Union(NodeId(2), NodeId(3)),
                Op::Union(NodeId(0), NodeId(2)),
                Op::Find(NodeId(3)),
            ]
        );
    }

    #[test]
    fn binomial_deepest_node_depth_is_k() {
        let k = 6;
        let trace = gen_binomial(k, 0);
        let mut dsu = DsuState::new(trace.n as usize, Variant::SIZE_OFF).unwrap();
        for op in &trace.ops {
            match *op {
                Op::Union(a, b) => {
                    dsu.union(a, b).unwrap();
                }
                Op::Find(p) => {
                    dsu.find(p).unwrap();
                }
            }
        }
        let deepest = dsu.find(NodeId(trace.n - 1)).unwrap();
        assert_eq!(deepest.root, NodeId(0));
        assert_eq!(deepest.path.len() as u32, k + 1);
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(n in 1u32..64, m in 0usize..200, seed in 0u64..1000) {
            let trace = gen_random(n, m, seed, 0.4);
            let mut parsed = parse_trace(&emit_trace(&trace)).unwrap();
            parsed.origin = trace.origin.clone();
            prop_assert_eq!(parsed, trace);
        }
    }
}
