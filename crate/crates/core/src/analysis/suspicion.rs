//! Disjuncts that show up disproportionately in ungrammatical parses.

use std::collections::BTreeMap;

use super::{check_records, AnalysisError, Intended, UsageRecord};
use crate::instrument::{DisjunctId, DisjunctInfo, Inventory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuspicionParams {
    /// Smoothing added to both counts.
    pub alpha: f64,
    /// Minimum score to be listed.
    pub tau: f64,
}

impl Default for SuspicionParams {
    fn default() -> Self {
        SuspicionParams { alpha: 1.0, tau: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suspect {
    pub disjunct: DisjunctInfo,
    pub score: f64,
    /// Parseable ungrammatical cases relying on the disjunct.
    pub ungrammatical: usize,
    /// Parseable grammatical cases relying on the disjunct.
    pub grammatical: usize,
    /// (id, text) of the ungrammatical cases, in suite order.
    pub sentences: Vec<(String, String)>,
}

/// Scores every disjunct used by at least one parseable ungrammatical case
/// as `(U + alpha) / (U + G + 2 alpha)` and keeps those reaching `tau`,
/// highest score first, then higher `U`, then lower id.
pub fn suspicion_scores(
    records: &[UsageRecord],
    inventory: &Inventory,
    params: SuspicionParams,
) -> Result<Vec<Suspect>, AnalysisError> {
    check_records(records, inventory)?;
    let mut bad: BTreeMap<DisjunctId, Vec<&UsageRecord>> = BTreeMap::new();
    let mut good: BTreeMap<DisjunctId, usize> = BTreeMap::new();
    for r in records.iter().filter(|r| r.parseable) {
        for id in r.union_set() {
            match r.intended {
                Intended::Bad => bad.entry(id).or_default().push(r),
                Intended::Ok => *good.entry(id).or_default() += 1,
            }
        }
    }
    let alpha = params.alpha;
    let mut out: Vec<Suspect> = bad
        .into_iter()
        .filter_map(|(id, cases)| {
            let u = cases.len();
            let g = good.get(&id).copied().unwrap_or(0);
            let score = (u as f64 + alpha) / ((u + g) as f64 + 2.0 * alpha);
            (score >= params.tau).then(|| Suspect {
                disjunct: inventory.get(id).expect("checked above").clone(),
                score,
                ungrammatical: u,
                grammatical: g,
                sentences: cases.iter().map(|r| (r.id.clone(), r.text.clone())).collect(),
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(b.ungrammatical.cmp(&a.ungrammatical))
            .then(a.disjunct.id.cmp(&b.disjunct.id))
    });
    Ok(out)
}
