//! Line-delimited JSON usage database.
//!
//! Line 1 is a header with the grammar hash and the inventory; every
//! further line is one test case. All objects are written with sorted keys.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_records, AnalysisError, Intended, UsageRecord};
use crate::engine::Usage;
use crate::instrument::{DisjunctId, DisjunctInfo, DisjunctKind, Inventory};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageDb {
    pub inventory: Inventory,
    pub records: Vec<UsageRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format_version: u32,
    grammar_hash: String,
    inventory: Vec<InventoryLine>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InventoryLine {
    id: DisjunctId,
    rule: String,
    kind: String,
    locus: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    id: String,
    text: String,
    intended: String,
    grammar_hash: String,
    parseable: bool,
    truncated: bool,
    readings: Vec<BTreeMap<DisjunctId, u32>>,
}

// Going through `Value` sorts object keys.
fn to_line<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("db lines are plain data");
    serde_json::to_string(&value).expect("values always serialize")
}

pub fn render_usage_db(inventory: &Inventory, records: &[UsageRecord]) -> String {
    let header = Header {
        format_version: FORMAT_VERSION,
        grammar_hash: inventory.grammar_hash.clone(),
        inventory: inventory
            .disjuncts
            .iter()
            .map(|d| InventoryLine {
                id: d.id,
                rule: d.rule_lhs.clone(),
                kind: d.kind.to_string(),
                locus: d.locus.to_string(),
            })
            .collect(),
    };
    let mut out = to_line(&header);
    out.push('\n');
    for r in records {
        let line = RecordLine {
            id: r.id.clone(),
            text: r.text.clone(),
            intended: r.intended.as_str().to_string(),
            grammar_hash: r.grammar_hash.clone(),
            parseable: r.parseable,
            truncated: r.truncated,
            readings: r.readings.iter().map(|u| u.0.clone()).collect(),
        };
        out.push_str(&to_line(&line));
        out.push('\n');
    }
    out
}

pub fn parse_usage_db(text: &str) -> Result<UsageDb, AnalysisError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let malformed = |line: usize, message: String| AnalysisError::Malformed { line, message };

    let (_, first) = lines.next().ok_or_else(|| malformed(1, "missing header".into()))?;
    let header: Header = serde_json::from_str(first).map_err(|e| malformed(1, e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(malformed(1, format!("unsupported format_version {}", header.format_version)));
    }
    let mut disjuncts = Vec::with_capacity(header.inventory.len());
    for d in header.inventory {
        let kind: DisjunctKind = d.kind.parse().map_err(|e: String| malformed(1, e))?;
        disjuncts.push(DisjunctInfo {
            id: d.id,
            rule_lhs: d.rule,
            kind,
            locus: d.locus.parse().map_err(|e: String| malformed(1, e))?,
        });
    }
    if disjuncts.windows(2).any(|w| w[0].id >= w[1].id) {
        return Err(malformed(1, "inventory is not sorted by id".into()));
    }
    let inventory = Inventory {
        grammar_hash: header.grammar_hash,
        disjuncts,
    };

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in lines {
        let lineno = n + 1;
        let r: RecordLine = serde_json::from_str(line).map_err(|e| malformed(lineno, e.to_string()))?;
        let intended: Intended = r.intended.parse().map_err(|e| malformed(lineno, e))?;
        if r.parseable == r.readings.is_empty() {
            return Err(malformed(lineno, "readings must be non-empty exactly when parseable".into()));
        }
        if r.readings.iter().any(|u| u.values().any(|&c| c == 0)) {
            return Err(malformed(lineno, "usage counts must be positive".into()));
        }
        if !seen.insert(r.id.clone()) {
            return Err(AnalysisError::DuplicateId(r.id));
        }
        records.push(UsageRecord {
            id: r.id,
            text: r.text,
            intended,
            grammar_hash: r.grammar_hash,
            parseable: r.parseable,
            truncated: r.truncated,
            readings: r.readings.into_iter().map(Usage).collect(),
        });
    }
    check_records(&records, &inventory)?;
    Ok(UsageDb { inventory, records })
}

pub fn write_usage_db(inventory: &Inventory, records: &[UsageRecord], path: &Path) -> Result<(), AnalysisError> {
    fs::write(path, render_usage_db(inventory, records))?;
    Ok(())
}

pub fn read_usage_db(path: &Path) -> Result<UsageDb, AnalysisError> {
    parse_usage_db(&fs::read_to_string(path)?)
}
