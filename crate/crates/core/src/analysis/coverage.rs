use std::collections::BTreeSet;

use super::{check_records, AnalysisError, UsageRecord};
use crate::instrument::{DisjunctId, DisjunctInfo, Inventory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub tested: usize,
    pub total: usize,
    pub untested: Vec<DisjunctInfo>,
    pub distinct_combos_tested: usize,
    /// Grammatical cases that did not parse; they do not count as tests.
    pub unparsed_grammatical: Vec<String>,
}

impl CoverageReport {
    /// Builds a report from bare counts.
    pub fn from_counts(tested: usize, total: usize) -> Self {
        CoverageReport {
            tested,
            total,
            untested: Vec::new(),
            distinct_combos_tested: 0,
            unparsed_grammatical: Vec::new(),
        }
    }

    /// tested / total. A grammar without disjuncts is fully covered.
    pub fn t_dis(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.tested as f64 / self.total as f64
        }
    }

    pub fn fraction(&self) -> String {
        format!("{}/{}", self.tested, self.total)
    }

    /// Two decimals, rounding halves up.
    pub fn t_dis_rounded(&self) -> String {
        self.hundredths(|t, n| (200 * t + n) / (2 * n))
    }

    /// Two decimals, truncating.
    pub fn t_dis_truncated(&self) -> String {
        self.hundredths(|t, n| 100 * t / n)
    }

    fn hundredths(&self, f: impl Fn(u128, u128) -> u128) -> String {
        let h = if self.total == 0 {
            100
        } else {
            f(self.tested as u128, self.total as u128)
        };
        format!("{}.{:02}", h / 100, h % 100)
    }
}

fn tested_union(records: &[UsageRecord]) -> BTreeSet<DisjunctId> {
    records
        .iter()
        .filter(|r| r.counts_as_test())
        .flat_map(|r| r.union_set())
        .collect()
}

pub fn untested_disjuncts(records: &[UsageRecord], inventory: &Inventory) -> Vec<DisjunctInfo> {
    let tested = tested_union(records);
    inventory
        .disjuncts
        .iter()
        .filter(|d| !tested.contains(&d.id))
        .cloned()
        .collect()
}

/// Number of distinct per-reading disjunct sets over all tests.
pub fn interaction_stats(records: &[UsageRecord]) -> usize {
    records
        .iter()
        .filter(|r| r.counts_as_test())
        .flat_map(|r| r.readings.iter().map(|u| u.ids()))
        .collect::<BTreeSet<_>>()
        .len()
}

pub fn disjunct_coverage(records: &[UsageRecord], inventory: &Inventory) -> Result<CoverageReport, AnalysisError> {
    check_records(records, inventory)?;
    let untested = untested_disjuncts(records, inventory);
    Ok(CoverageReport {
        tested: inventory.len() - untested.len(),
        total: inventory.len(),
        untested,
        distinct_combos_tested: interaction_stats(records),
        unparsed_grammatical: records
            .iter()
            .filter(|r| !r.parseable && r.intended == super::Intended::Ok)
            .map(|r| r.id.clone())
            .collect(),
    })
}
