//! Text and JSON renderings of the analysis results.

use std::fmt::Write;

use serde_json::{json, Value};

use gramcov_core::analysis::{CoverageReport, Suspect, SuspicionParams};
use gramcov_core::engine::EngineError;
use gramcov_core::grammar::Diagnostic;
use gramcov_core::instrument::DisjunctInfo;

use crate::{Level, Reduction};

/// ANSI styling for text reports; off unless asked for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn paint(self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn bold(self, text: &str) -> String {
        self.paint("1", text)
    }

    fn warn(self, text: &str) -> String {
        self.paint("33", text)
    }
}

fn to_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn disjunct_json(d: &DisjunctInfo) -> Value {
    json!({
        "id": d.id.to_string(),
        "rule": d.rule_lhs,
        "kind": d.kind.as_str(),
        "locus": d.locus.to_string(),
    })
}

fn disjunct_line(d: &DisjunctInfo) -> String {
    format!("{}  {}  {}  {}", d.id, d.rule_lhs, d.kind.as_str(), d.locus)
}

/// Integer percentage, rounded half up.
pub(crate) fn percent(part: usize, whole: usize) -> usize {
    if whole == 0 {
        return 100;
    }
    (200 * part + whole) / (2 * whole)
}

pub(crate) fn coverage_text(r: &CoverageReport, style: Style) -> String {
    let mut s = String::new();
    let headline = format!("disjunct coverage: {} = {}", r.fraction(), r.t_dis_rounded());
    writeln!(s, "{} (truncated {})", style.bold(&headline), r.t_dis_truncated()).unwrap();
    writeln!(s, "distinct disjunct combinations tested: {}", r.distinct_combos_tested).unwrap();
    writeln!(s, "unparsed grammatical cases: {}", r.unparsed_grammatical.len()).unwrap();
    for id in &r.unparsed_grammatical {
        writeln!(s, "  {id}").unwrap();
    }
    writeln!(s, "untested disjuncts: {}", r.untested.len()).unwrap();
    for d in &r.untested {
        writeln!(s, "  {}", style.warn(&disjunct_line(d))).unwrap();
    }
    s
}

pub(crate) fn coverage_json(r: &CoverageReport) -> String {
    to_json(json!({
        "tested": r.tested,
        "total": r.total,
        "fraction": r.fraction(),
        "t_dis": r.t_dis(),
        "t_dis_rounded": r.t_dis_rounded(),
        "t_dis_truncated": r.t_dis_truncated(),
        "distinct_combos_tested": r.distinct_combos_tested,
        "unparsed_grammatical": r.unparsed_grammatical,
        "untested": r.untested.iter().map(disjunct_json).collect::<Vec<_>>(),
    }))
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Equivalence => "equivalence",
        Level::Similarity => "similarity",
    }
}

pub(crate) fn reduction_text(r: &Reduction, style: Style) -> String {
    let mut s = String::new();
    writeln!(s, "level: {}", level_name(r.level)).unwrap();
    writeln!(s, "input cases: {}", r.input).unwrap();
    let kept = format!("kept cases: {} ({}%)", r.kept.len(), percent(r.kept.len(), r.input));
    writeln!(s, "{}", style.bold(&kept)).unwrap();
    writeln!(s, "equivalence classes: {} (strict: {})", r.equivalence_classes, r.strict_classes).unwrap();
    if r.level == Level::Similarity {
        writeln!(s, "selection order: {}", r.selection_order.join(" ")).unwrap();
    }
    writeln!(s, "removed: {}", r.removed.len()).unwrap();
    for id in &r.removed {
        writeln!(s, "  {id}").unwrap();
    }
    s
}

pub(crate) fn reduction_json(r: &Reduction) -> String {
    to_json(json!({
        "level": level_name(r.level),
        "input": r.input,
        "kept": r.kept,
        "relative_size_percent": percent(r.kept.len(), r.input),
        "selection_order": r.selection_order,
        "removed": r.removed,
        "equivalence_classes": r.equivalence_classes,
        "strict_classes": r.strict_classes,
    }))
}

pub(crate) fn suspects_text(suspects: &[Suspect], p: SuspicionParams, style: Style) -> String {
    let mut s = String::new();
    writeln!(s, "suspicious disjuncts (alpha {}, tau {}): {}", p.alpha, p.tau, suspects.len()).unwrap();
    for x in suspects {
        let head = format!(
            "{}  score {:.2}  U {}  G {}",
            disjunct_line(&x.disjunct),
            x.score,
            x.ungrammatical,
            x.grammatical
        );
        writeln!(s, "{}", style.warn(&head)).unwrap();
        for (id, text) in &x.sentences {
            writeln!(s, "  {id}  {text}").unwrap();
        }
    }
    s
}

pub(crate) fn suspects_json(suspects: &[Suspect], p: SuspicionParams) -> String {
    let list: Vec<Value> = suspects
        .iter()
        .map(|x| {
            json!({
                "disjunct": disjunct_json(&x.disjunct),
                "score": x.score,
                "ungrammatical": x.ungrammatical,
                "grammatical": x.grammatical,
                "sentences": x.sentences.iter().map(|(id, text)| json!({"id": id, "text": text})).collect::<Vec<_>>(),
            })
        })
        .collect();
    to_json(json!({ "alpha": p.alpha, "tau": p.tau, "suspects": list }))
}

pub(crate) fn validation_text(diags: &[Diagnostic], engine: Option<&EngineError>, style: Style) -> String {
    let mut s = String::new();
    for d in diags {
        writeln!(s, "{}", style.warn(&d.to_string())).unwrap();
    }
    if let Some(e) = engine {
        writeln!(s, "{}", style.warn(&format!("error: {e}"))).unwrap();
    }
    writeln!(s, "{} diagnostics", diags.len() + engine.is_some() as usize).unwrap();
    s
}

pub(crate) fn validation_json(diags: &[Diagnostic], engine: Option<&EngineError>) -> String {
    let list: Vec<Value> = diags
        .iter()
        .map(|d| json!({"kind": d.kind.as_str(), "location": d.location, "message": d.message}))
        .collect();
    to_json(json!({ "diagnostics": list, "engine_error": engine.map(|e| e.to_string()) }))
}
