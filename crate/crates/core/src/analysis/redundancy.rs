//! Redundant test cases: equivalence partitions and greedy reduction.

use std::collections::{BTreeSet, HashMap};

use super::UsageRecord;
use crate::engine::Usage;
use crate::instrument::DisjunctId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquivalenceMode {
    /// Same set of per-reading disjunct sets.
    Equivalence,
    /// Same set of per-reading disjunct multisets.
    Strict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    /// Classes ordered by their first member; members in suite order.
    pub classes: Vec<Vec<String>>,
    /// Cases left out because their readings were cut off at the cap.
    pub excluded_truncated: Vec<String>,
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Sets(BTreeSet<BTreeSet<DisjunctId>>),
    Multisets(BTreeSet<Usage>),
}

/// Partitions the parseable grammatical cases.
pub fn equivalence_classes(records: &[UsageRecord], mode: EquivalenceMode) -> Partition {
    let mut out = Partition::default();
    let mut index: HashMap<Key, usize> = HashMap::new();
    for r in records.iter().filter(|r| r.counts_as_test()) {
        if r.truncated {
            out.excluded_truncated.push(r.id.clone());
            continue;
        }
        let sig = r.signature();
        let key = match mode {
            EquivalenceMode::Equivalence => Key::Sets(sig.combos),
            EquivalenceMode::Strict => Key::Multisets(sig.strict_combos),
        };
        let next = out.classes.len();
        let slot = *index.entry(key).or_insert(next);
        if slot == next {
            out.classes.push(Vec::new());
        }
        out.classes[slot].push(r.id.clone());
    }
    out
}

/// Keeps the first case of every equivalence class, plus the truncated
/// cases that could not be classified. Result is in suite order.
pub fn reduce_by_equivalence(records: &[UsageRecord]) -> Vec<String> {
    let p = equivalence_classes(records, EquivalenceMode::Equivalence);
    let keep: BTreeSet<&String> = p
        .classes
        .iter()
        .map(|c| &c[0])
        .chain(&p.excluded_truncated)
        .collect();
    records
        .iter()
        .filter(|r| keep.contains(&r.id))
        .map(|r| r.id.clone())
        .collect()
}

/// Visits parseable grammatical cases from the largest disjunct union down
/// (ties in suite order) and keeps each one that relies on a disjunct no
/// kept case relies on yet. Result is in selection order.
pub fn greedy_reduce(records: &[UsageRecord]) -> Vec<String> {
    let mut candidates: Vec<(&UsageRecord, BTreeSet<DisjunctId>)> = records
        .iter()
        .filter(|r| r.counts_as_test())
        .map(|r| (r, r.union_set()))
        .collect();
    candidates.sort_by_key(|c| std::cmp::Reverse(c.1.len()));
    let mut covered = BTreeSet::new();
    let mut selected = Vec::new();
    for (r, union) in candidates {
        if !union.is_subset(&covered) {
            covered.extend(union);
            selected.push(r.id.clone());
        }
    }
    selected
}
