//! Run reports: a JSON document summarizing every check performed over a
//! trace, plus a per-find CSV with potential deltas.

use crate::ackfn::{alpha, loghat, loghat_star, log_star};
use crate::instrument::{Lemma4Report, ViolationLog};
use crate::potential::{FindRow, KindReport};
use crate::workload::TraceOrigin;
use serde::Serialize;
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub variant: String,
    pub kinds: Vec<String>,
    pub seed: Option<u64>,
    pub oracle_cap: u32,
    pub constants: crate::potential::Constants,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaVerdicts {
    pub size_monotone: ViolationLog,
    pub parent_size_max_monotone: ViolationLog,
    pub balance: ViolationLog,
    pub size_relation: ViolationLog,
    pub path_growth: ViolationLog,
    pub charged_sum: Option<Lemma4Report>,
}

impl LemmaVerdicts {
    pub fn pass(&self) -> bool {
        self.size_monotone.pass()
            && self.parent_size_max_monotone.pass()
            && self.balance.pass()
            && self.size_relation.pass()
            && self.path_growth.pass()
            && self.charged_sum.as_ref().map_or(true, |c| c.pass)
    }
}

/// Results of the independent-oracle cross checks run during the trace.
#[derive(Clone, Debug, Serialize)]
pub struct OracleVerdicts {
    /// How many steps ran the full set-of-descendants cross check.
    pub checked_steps: u64,
    pub partition_mismatches: u64,
    pub size_mismatches: u64,
    /// Full from-scratch recomputations of the shadow forest.
    pub recompute_checks: u64,
}

impl OracleVerdicts {
    pub fn pass(&self) -> bool {
        self.partition_mismatches == 0 && self.size_mismatches == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub trace: TraceOrigin,
    pub steps: u64,
    pub finds: u64,
    pub unions: u64,
    pub total_path_edges: u64,
    pub lemmas: LemmaVerdicts,
    pub oracle: OracleVerdicts,
    /// Per-potential-kind accounting; empty when accounting was disabled
    /// (non-default variant or injected prelude).
    pub kinds: Vec<KindReport>,
    pub accounting_enabled: bool,
    pub overall_pass: bool,
    #[serde(skip)]
    pub rows: Vec<FindRow>,
}

impl RunReport {
    pub fn compute_overall(&mut self) {
        self.overall_pass =
            self.lemmas.pass() && self.oracle.pass() && self.kinds.iter().all(|k| k.pass);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// One CSV row per find: step, path size, then per-kind delta / event
    /// count / verdict columns.
    pub fn finds_csv(&self) -> String {
        let mut out = String::from("step,sub,path_nodes,path_edges");
        for kind in &self.config.kinds {
            write!(out, ",{kind}_delta_phi,{kind}_events,{kind}_verdict").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{},{},{},{}", row.step, row.sub, row.path_nodes, row.path_edges).unwrap();
            for stats in &row.per_kind {
                write!(
                    out,
                    ",{:.6},{},{}",
                    stats.delta_phi, stats.events, stats.verdict
                )
                .unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Console one-liners, one per check family.
    pub fn summary_lines(&self) -> Vec<String> {
        fn line(name: &str, ok: bool) -> String {
            format!("{}  {name}", if ok { "PASS" } else { "FAIL" })
        }
        let mut lines = vec![
            line("size-monotone", self.lemmas.size_monotone.pass()),
            line(
                "parent-size-max-monotone",
                self.lemmas.parent_size_max_monotone.pass(),
            ),
            line("balance", self.lemmas.balance.pass()),
            line("size-relation", self.lemmas.size_relation.pass()),
            line("path-growth", self.lemmas.path_growth.pass()),
            line(
                "charged-sum",
                self.lemmas.charged_sum.as_ref().map_or(true, |c| c.pass),
            ),
            line("oracle", self.oracle.pass()),
        ];
        for kind in &self.kinds {
            lines.push(line(&format!("account-{}", kind.kind), kind.pass));
        }
        lines.push(line("overall", self.overall_pass));
        lines
    }
}

/// Growth-function table for a list of `n` values, one row per `n`.
pub fn bounds_table(ns: &[u64]) -> String {
    let mut out = String::from(
        "n,log2,log2log2,log_star,loghat_star,loghat_star2,alpha\n",
    );
    for &n in ns {
        let nf = n as f64;
        writeln!(
            out,
            "{n},{:.3},{:.3},{},{},{},{}",
            nf.log2(),
            if n <= 2 { 0.0 } else { nf.log2().log2() },
            log_star(nf),
            loghat_star(nf),
            loghat(2, nf),
            alpha(n)
        )
        .unwrap();
    }
    out
}
