//! Executes a trace against the forest while mirroring every parent-pointer
//! rewrite into the instrumentation layer and the exact-set shadow oracle,
//! and feeding every find path into the potential accounting.

use crate::dsu::{ChangeCause, DsuError, DsuEvent, DsuState, FindOutcome, LinkRule, NodeId, Variant};
use crate::instrument::InstrumentState;
use crate::potential::{Accounting, Constants, LinkSnapshot, PathSnapshot, PotentialKind};
use crate::report::{ConfigEcho, LemmaVerdicts, OracleVerdicts, RunReport, SCHEMA_VERSION};
use crate::shadow::ShadowForest;
use crate::workload::{Op, Trace};
use std::cell::RefCell;
use std::rc::Rc;
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub variant: Variant,
    pub kinds: Vec<PotentialKind>,
    pub constants: Constants,
    /// Echoed into the report when the trace came from a seeded generator.
    pub seed: Option<u64>,
    /// Run the exact descendant-set oracle every step when `n` is at most
    /// this; above it only the cheap per-step checks run.
    pub oracle_cap: u32,
    /// Steps between from-scratch shadow recomputations (also run at the
    /// end of the trace).
    pub check_interval: u64,
    /// Keep the per-find rows for CSV output.
    pub keep_rows: bool,
    /// Stop executing the trace at the first recorded violation (the
    /// default is to keep going and accumulate all of them).
    pub fail_fast: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            variant: Variant::SIZE_ON,
            kinds: PotentialKind::DEFAULT.to_vec(),
            constants: Constants::default(),
            seed: None,
            oracle_cap: 256,
            check_interval: 64,
            keep_rows: true,
            fail_fast: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Dsu(#[from] DsuError),
}

pub fn run_trace(trace: &Trace, config: &RunConfig) -> Result<RunReport, RunError> {
    let n = trace.n as usize;
    let mut dsu = if trace.prelude.is_empty() {
        DsuState::new(n, config.variant)?
    } else {
        DsuState::inject(n, &trace.prelude)?
    };
    let mut shadow = if trace.prelude.is_empty() {
        ShadowForest::new(n)
    } else {
        ShadowForest::from_injected(n, &trace.prelude)
    };
    let mut inst = if trace.prelude.is_empty() {
        InstrumentState::new(n, config.variant.link)
    } else {
        InstrumentState::from_injected(n, &trace.prelude)
    };

    // Potential accounting applies to organic by-size runs with compression
    // on; other variants and injected shapes run lemma/oracle checks only.
    let accounting_enabled = config.variant == Variant::SIZE_ON && trace.prelude.is_empty();
    let mut accounting = accounting_enabled
        .then(|| Accounting::new(&config.kinds, config.constants.clone(), trace.n as u64));

    let events: Rc<RefCell<Vec<DsuEvent>>> = Rc::new(RefCell::new(Vec::new()));
    {
        let sink = Rc::clone(&events);
        dsu.subscribe(Box::new(move |ev| sink.borrow_mut().push(ev.clone())))
            .expect("fresh state has no observer");
    }

    let compressing = config.variant.compression == crate::dsu::Compression::On;
    let mut rows = Vec::new();
    let mut oracle = OracleVerdicts {
        checked_steps: 0,
        partition_mismatches: 0,
        size_mismatches: 0,
        recompute_checks: 0,
    };
    let mut finds = 0u64;
    let mut unions = 0u64;
    let mut total_path_edges = 0u64;

    let handle_find = |inst: &mut InstrumentState,
                           accounting: &mut Option<Accounting>,
                           rows: &mut Vec<crate::potential::FindRow>,
                           total_path_edges: &mut u64,
                           out: &FindOutcome,
                           step: u64,
                           sub: u8| {
        let compressed = compressing && out.path.len() > 2;
        *total_path_edges += (out.path.len() - 1) as u64;
        let snap = accounting.as_ref().map(|_| PathSnapshot {
            step,
            sub,
            nodes: out.path.clone(),
            cur_before: out.path.iter().map(|&q| inst.cur_size(q)).collect(),
            size_max: out.path.iter().map(|&q| inst.size_max(q)).collect(),
            compressed,
        });
        inst.apply_find(&out.path, compressed, step);
        if let (Some(acct), Some(snap)) = (accounting.as_mut(), snap) {
            let row = acct.on_find(&snap);
            if config.keep_rows {
                rows.push(row);
            }
        }
    };

    for op in &trace.ops {
        match *op {
            Op::Find(p) => {
                finds += 1;
                let out = dsu.find(p)?;
                let step = dsu.op_clock();
                handle_find(
                    &mut inst,
                    &mut accounting,
                    &mut rows,
                    &mut total_path_edges,
                    &out,
                    step,
                    0,
                );
            }
            Op::Union(a, b) => {
                unions += 1;
                let out = dsu.union(a, b)?;
                let step = dsu.op_clock();
                handle_find(
                    &mut inst,
                    &mut accounting,
                    &mut rows,
                    &mut total_path_edges,
                    &out.find_a,
                    step,
                    0,
                );
                handle_find(
                    &mut inst,
                    &mut accounting,
                    &mut rows,
                    &mut total_path_edges,
                    &out.find_b,
                    step,
                    1,
                );
                if out.merged {
                    let winner = out.root;
                    let loser = if out.find_a.root == winner {
                        out.find_b.root
                    } else {
                        out.find_a.root
                    };
                    if let Some(acct) = accounting.as_mut() {
                        let winner_before = inst.size_max(winner);
                        acct.on_link(&LinkSnapshot {
                            step,
                            loser_cur: inst.cur_size(loser),
                            loser_size_max: inst.size_max(loser),
                            winner_size_max_before: winner_before,
                            winner_size_max_after: inst.cur_size(winner)
                                + inst.cur_size(loser),
                            children_size_max: inst
                                .children(winner)
                                .iter()
                                .map(|&c| inst.size_max(NodeId(c)))
                                .collect(),
                        });
                    }
                    inst.apply_link(loser, winner, dsu.rank_of(winner), step);
                }
            }
        }

        // Mirror this step's rewrites into the shadow oracle.
        let step_events = std::mem::take(&mut *events.borrow_mut());
        for ev in &step_events {
            match ev {
                DsuEvent::Parent(pe) => {
                    shadow.apply(pe).expect("shadow and forest agree on structure");
                    if let ChangeCause::Union = pe.cause {
                        debug_assert!(pe.old_parent == pe.node);
                    }
                }
                DsuEvent::StepBoundary { .. } => {}
            }
        }

        let step = dsu.op_clock();
        if trace.n <= config.oracle_cap {
            oracle.checked_steps += 1;
            for p in 0..n as u32 {
                let p = NodeId(p);
                if shadow.root_of(p) != dsu.root_of(p)? {
                    oracle.partition_mismatches += 1;
                }
                if shadow.size(p) != inst.cur_size(p)
                    || (dsu.is_root(p) && shadow.size(p) != dsu.size_of(p))
                {
                    oracle.size_mismatches += 1;
                }
                // Frozen max sizes equal the shadow's ever-descendant counts
                // for non-roots under by-size.
                if config.variant.link == LinkRule::BySize
                    && trace.prelude.is_empty()
                    && !dsu.is_root(p)
                    && shadow.ever_size(p) != inst.size_max(p)
                {
                    oracle.size_mismatches += 1;
                }
            }
        }
        if step % config.check_interval == 0 && trace.n <= config.oracle_cap {
            oracle.recompute_checks += 1;
            if let Err(msg) = shadow.check_consistency() {
                oracle.partition_mismatches += 1;
                debug_assert!(false, "shadow inconsistency: {msg}");
            }
        }

        if config.fail_fast {
            let violations = inst.lemma1.count
                + inst.lemma2.count
                + inst.lemma3.count
                + inst.size_relation.count
                + oracle.partition_mismatches
                + oracle.size_mismatches
                + accounting.as_ref().map_or(0, Accounting::violation_count);
            if violations > 0 {
                break;
            }
        }
    }

    dsu.assert_acyclic();
    if trace.n <= config.oracle_cap {
        oracle.recompute_checks += 1;
        if let Err(_msg) = shadow.check_consistency() {
            oracle.partition_mismatches += 1;
        }
    }

    let charged_sum = (config.variant.link == LinkRule::BySize && trace.prelude.is_empty())
        .then(|| inst.check_lemma4());
    let (kinds, path_growth) = accounting.map(Accounting::finish).unwrap_or_default();

    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            variant: config.variant.to_string(),
            kinds: config.kinds.iter().map(|k| k.name()).collect(),
            seed: config.seed,
            oracle_cap: config.oracle_cap,
            constants: config.constants.clone(),
        },
        trace: trace.origin_summary(),
        steps: dsu.op_clock(),
        finds,
        unions,
        total_path_edges,
        lemmas: LemmaVerdicts {
            size_monotone: inst.lemma1.clone(),
            parent_size_max_monotone: inst.lemma2.clone(),
            balance: inst.lemma3.clone(),
            size_relation: inst.size_relation.clone(),
            path_growth,
            charged_sum,
        },
        oracle,
        kinds,
        accounting_enabled,
        overall_pass: false,
        rows,
    };
    report.compute_overall();
    Ok(report)
}

/// Runs many traces under the same config; data-parallel over traces when
/// the `parallel` feature is on.
pub fn run_batch(traces: &[Trace], config: &RunConfig) -> Vec<Result<RunReport, RunError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        traces.par_iter().map(|t| run_trace(t, config)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        traces.iter().map(|t| run_trace(t, config)).collect()
    }
}
