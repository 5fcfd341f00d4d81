//! Usage records collected over a testsuite, and the analyses run on them.

mod coverage;
mod db;
mod redundancy;
mod suite;
mod suspicion;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::{ParseResult, Usage};
use crate::instrument::{DisjunctId, Inventory};

pub use coverage::{disjunct_coverage, interaction_stats, untested_disjuncts, CoverageReport};
pub use db::{parse_usage_db, read_usage_db, render_usage_db, write_usage_db, UsageDb, FORMAT_VERSION};
pub use redundancy::{equivalence_classes, greedy_reduce, reduce_by_equivalence, EquivalenceMode, Partition};
pub use suite::{parse_suite, render_suite, Intended, TestCase, TestSuite};
pub use suspicion::{suspicion_scores, Suspect, SuspicionParams};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("grammar mismatch: expected {expected}, found {found}")]
    GrammarMismatch { expected: String, found: String },
    #[error("{0} does not occur in the inventory")]
    UnknownDisjunct(DisjunctId),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate test case id `{0}`")]
    DuplicateId(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Disjunct usage of one test case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageRecord {
    pub id: String,
    pub text: String,
    pub intended: Intended,
    /// Hash of the instrumented grammar the case was parsed with.
    pub grammar_hash: String,
    pub parseable: bool,
    pub truncated: bool,
    pub readings: Vec<Usage>,
}

impl UsageRecord {
    pub fn from_parse(case: &TestCase, grammar_hash: &str, result: &ParseResult) -> Self {
        UsageRecord {
            id: case.id.clone(),
            text: case.text.clone(),
            intended: case.intended,
            grammar_hash: grammar_hash.to_string(),
            parseable: result.parseable,
            truncated: result.truncated,
            readings: result.readings.iter().map(|r| r.usage.clone()).collect(),
        }
    }

    /// Parseable and intended grammatical: the cases coverage and reduction
    /// are computed over.
    pub fn counts_as_test(&self) -> bool {
        self.parseable && self.intended == Intended::Ok
    }

    pub fn signature(&self) -> RelianceSignature {
        RelianceSignature::of(&self.readings)
    }

    pub fn union_set(&self) -> BTreeSet<DisjunctId> {
        self.readings.iter().flat_map(|u| u.0.keys().copied()).collect()
    }
}

/// What a test case relies on, at the three granularities the redundancy
/// analyses need.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelianceSignature {
    pub union_set: BTreeSet<DisjunctId>,
    pub combos: BTreeSet<BTreeSet<DisjunctId>>,
    pub strict_combos: BTreeSet<Usage>,
}

impl RelianceSignature {
    pub fn of(readings: &[Usage]) -> Self {
        let combos: BTreeSet<BTreeSet<DisjunctId>> = readings.iter().map(Usage::ids).collect();
        RelianceSignature {
            union_set: combos.iter().flatten().copied().collect(),
            combos,
            strict_combos: readings.iter().cloned().collect(),
        }
    }
}

/// Fails unless every record was produced with the inventory's grammar and
/// only uses disjuncts it lists.
pub fn check_records(records: &[UsageRecord], inventory: &Inventory) -> Result<(), AnalysisError> {
    for r in records {
        if r.grammar_hash != inventory.grammar_hash {
            return Err(AnalysisError::GrammarMismatch {
                expected: inventory.grammar_hash.clone(),
                found: r.grammar_hash.clone(),
            });
        }
        for id in r.union_set() {
            if inventory.get(id).is_none() {
                return Err(AnalysisError::UnknownDisjunct(id));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::engine::CompiledGrammar;
    use crate::grammar::parse_grammar;
    use crate::instrument::{instrument_grammar, InstrumentOptions};

    pub const G0: &str = include_str!("../../testdata/g0.gr");

    pub struct G0Fixture {
        pub compiled: CompiledGrammar,
        pub inventory: Inventory,
    }

    impl G0Fixture {
        pub fn new() -> Self {
            let inst = instrument_grammar(&parse_grammar(G0).unwrap(), InstrumentOptions::default()).unwrap();
            G0Fixture {
                compiled: CompiledGrammar::new(&inst.grammar).unwrap(),
                inventory: inst.inventory(),
            }
        }

        pub fn record(&self, id: &str, intended: Intended, text: &str) -> UsageRecord {
            let case = TestCase {
                id: id.into(),
                text: text.into(),
                intended,
            };
            UsageRecord::from_parse(&case, &self.inventory.grammar_hash, &self.compiled.parse(text, 1000))
        }

        pub fn ok(&self, id: &str, text: &str) -> UsageRecord {
            self.record(id, Intended::Ok, text)
        }
    }

    pub fn ids(ns: &[u32]) -> BTreeSet<DisjunctId> {
        ns.iter().map(|&n| DisjunctId(n)).collect()
    }
}
