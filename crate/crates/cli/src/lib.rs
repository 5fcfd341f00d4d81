//! The `gramcov` pipeline: instrument a grammar, run a testsuite through it,
//! and analyse the resulting usage database.
//!
//! Every command returns its output as strings instead of printing, so the
//! binary stays a thin wrapper and the commands can be tested directly.

mod report;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use gramcov_core::analysis::{
    self, disjunct_coverage, equivalence_classes, greedy_reduce, parse_suite, read_usage_db, reduce_by_equivalence,
    render_suite, suspicion_scores, write_usage_db, AnalysisError, EquivalenceMode, SuspicionParams, TestSuite,
    UsageDb, UsageRecord,
};
use gramcov_core::engine::{CompiledGrammar, EngineError};
use gramcov_core::grammar::{parse_grammar, print_grammar, validate, Grammar, GrammarError};
use gramcov_core::instrument::{
    instrument_grammar, parse_inventory_tsv, render_inventory_tsv, InstrumentError, InstrumentOptions, Inventory,
};

pub use report::Style;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Grammar { path: PathBuf, source: GrammarError },
    #[error("{path}: {source}")]
    Instrument { path: PathBuf, source: InstrumentError },
    #[error("{path}: {source}")]
    Analysis { path: PathBuf, source: AnalysisError },
    #[error("{path}: {source}")]
    Engine { path: PathBuf, source: EngineError },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn analysis(path: &Path, source: AnalysisError) -> Self {
        CliError::Analysis {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    /// The analysis found something and `--strict` was given.
    Findings,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Clean => 0,
            Status::Findings => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub status: Status,
}

impl Output {
    fn new(stdout: String) -> Self {
        Output {
            stdout,
            stderr: String::new(),
            status: Status::Clean,
        }
    }

    fn flag(mut self, strict: bool, found: bool) -> Self {
        if strict && found {
            self.status = Status::Findings;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Level {
    /// Keep one case per equivalence class.
    Equivalence,
    /// Greedy selection over disjunct unions.
    #[default]
    Similarity,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    pub format: Format,
    pub strict: bool,
    pub style: Style,
}

pub const DEFAULT_CAP: usize = gramcov_core::engine::DEFAULT_READING_CAP;

/// The inventory written next to an instrumented grammar: same path with
/// the extension replaced by `inv`.
pub fn default_inventory_path(grammar: &Path) -> PathBuf {
    grammar.with_extension("inv")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_grammar(path: &Path) -> Result<Grammar, CliError> {
    parse_grammar(&read(path)?).map_err(|source| CliError::Grammar {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads an instrumented grammar and its inventory, and checks that the two
/// describe the same markers.
pub fn load_instrumented(grammar: &Path, inventory: Option<&Path>) -> Result<(Grammar, Inventory), CliError> {
    let g = load_grammar(grammar)?;
    let inv_path = inventory.map(Path::to_path_buf).unwrap_or_else(|| default_inventory_path(grammar));
    let disjuncts = parse_inventory_tsv(&read(&inv_path)?).map_err(|source| CliError::Instrument {
        path: inv_path.clone(),
        source,
    })?;
    let listed: Vec<_> = disjuncts.iter().map(|d| d.id).collect();
    let mut found = g.markers();
    found.sort();
    if listed != found {
        return Err(CliError::Usage(format!(
            "{}: inventory does not match the markers of {}",
            inv_path.display(),
            grammar.display()
        )));
    }
    let inventory = Inventory {
        grammar_hash: g.content_hash(),
        disjuncts,
    };
    Ok((g, inventory))
}

pub fn cmd_instrument(
    grammar: &Path,
    out: &Path,
    inventory: Option<&Path>,
    opts: InstrumentOptions,
) -> Result<Output, CliError> {
    let g = load_grammar(grammar)?;
    let inst = instrument_grammar(&g, opts).map_err(|source| CliError::Instrument {
        path: grammar.to_path_buf(),
        source,
    })?;
    let inv_path = inventory.map(Path::to_path_buf).unwrap_or_else(|| default_inventory_path(out));
    if inv_path == out {
        return Err(CliError::Usage("inventory path must differ from the output grammar".into()));
    }
    write(out, &print_grammar(&inst.grammar))?;
    write(&inv_path, &render_inventory_tsv(&inst.disjuncts))?;
    Ok(Output::new(format!(
        "{} disjuncts\ninstrumented grammar: {}\ninventory: {}\n",
        inst.disjuncts.len(),
        out.display(),
        inv_path.display()
    )))
}

pub fn cmd_run(
    grammar: &Path,
    inventory: Option<&Path>,
    suite: &Path,
    out: &Path,
    cap: usize,
) -> Result<Output, CliError> {
    if cap == 0 {
        return Err(CliError::Usage("--cap must be at least 1".into()));
    }
    let (g, inv) = load_instrumented(grammar, inventory)?;
    let compiled = CompiledGrammar::new(&g).map_err(|source| CliError::Engine {
        path: grammar.to_path_buf(),
        source,
    })?;
    let suite: TestSuite = parse_suite(&read(suite)?).map_err(|e| CliError::analysis(suite, e))?;
    let results: Vec<_> = suite
        .cases
        .par_iter()
        .map(|case| {
            let parse = compiled.parse(&case.text, cap);
            (UsageRecord::from_parse(case, &inv.grammar_hash, &parse), parse.diagnostics)
        })
        .collect();
    let mut stderr = String::new();
    let mut records = Vec::with_capacity(results.len());
    for (record, diagnostics) in results {
        for d in diagnostics.iter().filter(|d| d.starts_with("unknown token")) {
            stderr.push_str(&format!("case {}: {d}\n", record.id));
        }
        if record.truncated {
            stderr.push_str(&format!("case {}: readings truncated at {cap}\n", record.id));
        }
        records.push(record);
    }
    write_usage_db(&inv, &records, out).map_err(|e| CliError::analysis(out, e))?;
    let parseable = records.iter().filter(|r| r.parseable).count();
    let truncated = records.iter().filter(|r| r.truncated).count();
    let mut o = Output::new(format!(
        "{} cases, {parseable} parseable, {truncated} truncated\nusage database: {}\n",
        records.len(),
        out.display()
    ));
    o.stderr = stderr;
    Ok(o)
}

/// Loads a usage database, optionally checking it against an instrumented
/// grammar.
pub fn load_db(db: &Path, grammar: Option<&Path>) -> Result<UsageDb, CliError> {
    let loaded = read_usage_db(db).map_err(|e| CliError::analysis(db, e))?;
    if let Some(gp) = grammar {
        let hash = load_grammar(gp)?.content_hash();
        if hash != loaded.inventory.grammar_hash {
            return Err(CliError::analysis(
                db,
                AnalysisError::GrammarMismatch {
                    expected: hash,
                    found: loaded.inventory.grammar_hash,
                },
            ));
        }
    }
    Ok(loaded)
}

pub fn cmd_coverage(db: &Path, grammar: Option<&Path>, opts: ReportOptions) -> Result<Output, CliError> {
    let loaded = load_db(db, grammar)?;
    let rep = disjunct_coverage(&loaded.records, &loaded.inventory).map_err(|e| CliError::analysis(db, e))?;
    let text = match opts.format {
        Format::Text => report::coverage_text(&rep, opts.style),
        Format::Json => report::coverage_json(&rep),
    };
    Ok(Output::new(text).flag(opts.strict, !rep.untested.is_empty()))
}

/// The outcome of `reduce`: which cases survive and the suite they form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub level: Level,
    pub input: usize,
    /// Ids kept, in suite order.
    pub kept: Vec<String>,
    /// Ids in the order the greedy heuristic picked them.
    pub selection_order: Vec<String>,
    pub removed: Vec<String>,
    pub equivalence_classes: usize,
    pub strict_classes: usize,
    pub reduced_suite: TestSuite,
}

/// Only parseable grammatical cases can be judged redundant; every other
/// case is kept.
pub fn reduce(records: &[UsageRecord], level: Level) -> Reduction {
    let selected = match level {
        Level::Similarity => greedy_reduce(records),
        Level::Equivalence => reduce_by_equivalence(records),
    };
    let keep: std::collections::HashSet<&String> = selected.iter().collect();
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    let mut cases = Vec::new();
    for r in records {
        if !r.counts_as_test() || keep.contains(&r.id) {
            kept.push(r.id.clone());
            cases.push(analysis::TestCase {
                id: r.id.clone(),
                text: r.text.clone(),
                intended: r.intended,
            });
        } else {
            removed.push(r.id.clone());
        }
    }
    Reduction {
        level,
        input: records.len(),
        kept,
        selection_order: selected,
        removed,
        equivalence_classes: equivalence_classes(records, EquivalenceMode::Equivalence).classes.len(),
        strict_classes: equivalence_classes(records, EquivalenceMode::Strict).classes.len(),
        reduced_suite: TestSuite { cases },
    }
}

pub fn cmd_reduce(
    db: &Path,
    grammar: Option<&Path>,
    level: Level,
    out: Option<&Path>,
    opts: ReportOptions,
) -> Result<Output, CliError> {
    let loaded = load_db(db, grammar)?;
    let red = reduce(&loaded.records, level);
    if let Some(path) = out {
        write(path, &render_suite(&red.reduced_suite))?;
    }
    let text = match opts.format {
        Format::Text => report::reduction_text(&red, opts.style),
        Format::Json => report::reduction_json(&red),
    };
    Ok(Output::new(text).flag(opts.strict, !red.removed.is_empty()))
}

pub fn cmd_suspects(
    db: &Path,
    grammar: Option<&Path>,
    params: SuspicionParams,
    opts: ReportOptions,
) -> Result<Output, CliError> {
    if !(params.alpha >= 0.0 && params.alpha.is_finite()) {
        return Err(CliError::Usage("--alpha must be a finite number >= 0".into()));
    }
    if !(0.0..=1.0).contains(&params.tau) {
        return Err(CliError::Usage("--tau must lie in [0, 1]".into()));
    }
    let loaded = load_db(db, grammar)?;
    let suspects =
        suspicion_scores(&loaded.records, &loaded.inventory, params).map_err(|e| CliError::analysis(db, e))?;
    let text = match opts.format {
        Format::Text => report::suspects_text(&suspects, params, opts.style),
        Format::Json => report::suspects_json(&suspects, params),
    };
    Ok(Output::new(text).flag(opts.strict, !suspects.is_empty()))
}

pub fn cmd_validate(grammar: &Path, opts: ReportOptions) -> Result<Output, CliError> {
    let g = load_grammar(grammar)?;
    let diags = validate(&g);
    let compiled = CompiledGrammar::new(&g).err();
    let text = match opts.format {
        Format::Text => report::validation_text(&diags, compiled.as_ref(), opts.style),
        Format::Json => report::validation_json(&diags, compiled.as_ref()),
    };
    Ok(Output::new(text).flag(opts.strict, !diags.is_empty() || compiled.is_some()))
}
