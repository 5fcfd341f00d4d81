//! Disjunct enumeration and grammar instrumentation.
//!
//! A disjunct is an atomic alternative of the grammar: a branch of an
//! explicit `{ .. | .. }`, the absent/present choice of `X ?`, the
//! zero/one-or-more choice of `X *`, or a branch of an annotation
//! disjunction. Instrumentation rewrites the grammar so that each disjunct
//! carries exactly one `@DISJUNCT-nnn;` marker:
//!
//! ```text
//! X ? (A)                    =>  { e (@D-absent;) | X (A @D-present;) }
//! X * (A)                    =>  { e (@D-zero;)   | X + (A @D-some;) }
//! X * ({ A | B })            =>  { e (@D-zero;)   | X + ({ A @D-a; | B @D-b; }) }
//! { ... Y (A) | ... }        =>  { ... Y (A @D-branch;) | ... }
//! ```
//!
//! Markers are numbered globally in the order they appear in the
//! instrumented text.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::grammar::{Annotation, Element, Grammar, Repetition, RhsItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DisjunctId(pub u32);

impl fmt::Display for DisjunctId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DISJUNCT-{:03}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed disjunct id `{0}`")]
pub struct ParseIdError(String);

impl FromStr for DisjunctId {
    type Err = ParseIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix("DISJUNCT-")
            .ok_or_else(|| ParseIdError(s.into()))?;
        if digits.len() < 3 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseIdError(s.into()));
        }
        match digits.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(DisjunctId(n)),
            _ => Err(ParseIdError(s.into())),
        }
    }
}

impl Serialize for DisjunctId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DisjunctId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DisjunctKind {
    PsBranch,
    OptionalityAbsent,
    OptionalityPresent,
    IterationZero,
    IterationSome,
    AnnotationBranch,
    /// Only produced when lexicon instrumentation is switched on.
    LexicalEntry,
}

impl DisjunctKind {
    pub const ALL: [DisjunctKind; 7] = [
        DisjunctKind::PsBranch,
        DisjunctKind::OptionalityAbsent,
        DisjunctKind::OptionalityPresent,
        DisjunctKind::IterationZero,
        DisjunctKind::IterationSome,
        DisjunctKind::AnnotationBranch,
        DisjunctKind::LexicalEntry,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DisjunctKind::PsBranch => "ps-branch",
            DisjunctKind::OptionalityAbsent => "optionality-absent",
            DisjunctKind::OptionalityPresent => "optionality-present",
            DisjunctKind::IterationZero => "iteration-zero",
            DisjunctKind::IterationSome => "iteration-some",
            DisjunctKind::AnnotationBranch => "annotation-branch",
            DisjunctKind::LexicalEntry => "lexical-entry",
        }
    }
}

impl fmt::Display for DisjunctKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DisjunctKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DisjunctKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown disjunct kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocusOwner {
    Rule(usize),
    Lexicon(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocusStep {
    /// Index into an RHS item list.
    Item(usize),
    /// Branch of a disjunction (RHS or annotation).
    Branch(usize),
    /// Index into an annotation list.
    Annotation(usize),
}

/// Structural position of a disjunct in the *uninstrumented* grammar.
///
/// Rendered as `R1.i2.a0.b1`: rule 1 (0-based, in merged rule order),
/// item 2, annotation 0, branch 1. Lexical entries start with `L`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Locus {
    pub owner: LocusOwner,
    pub steps: Vec<LocusStep>,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.owner {
            LocusOwner::Rule(r) => write!(f, "R{r}")?,
            LocusOwner::Lexicon(l) => write!(f, "L{l}")?,
        }
        for step in &self.steps {
            match step {
                LocusStep::Item(k) => write!(f, ".i{k}")?,
                LocusStep::Branch(k) => write!(f, ".b{k}")?,
                LocusStep::Annotation(k) => write!(f, ".a{k}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Locus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("malformed locus `{s}`");
        let mut parts = s.split('.');
        let head = parts.next().ok_or_else(bad)?;
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let owner = if let Some(n) = head.strip_prefix('R') {
            LocusOwner::Rule(num(n)?)
        } else if let Some(n) = head.strip_prefix('L') {
            LocusOwner::Lexicon(num(n)?)
        } else {
            return Err(bad());
        };
        let steps = parts
            .map(|p| {
                let (tag, n) = p.split_at(p.len().min(1));
                let n = num(n)?;
                match tag {
                    "i" => Ok(LocusStep::Item(n)),
                    "b" => Ok(LocusStep::Branch(n)),
                    "a" => Ok(LocusStep::Annotation(n)),
                    _ => Err(bad()),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(Locus { owner, steps })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DisjunctInfo {
    pub id: DisjunctId,
    /// Left-hand side of the owning rule (the category, for lexical entries).
    pub rule_lhs: String,
    pub kind: DisjunctKind,
    pub locus: Locus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InstrumentOptions {
    pub include_lexicon: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instrumented {
    pub grammar: Grammar,
    pub disjuncts: Vec<DisjunctInfo>,
}

impl Instrumented {
    pub fn inventory(&self) -> Inventory {
        Inventory {
            grammar_hash: self.grammar.content_hash(),
            disjuncts: self.disjuncts.clone(),
        }
    }
}

/// The disjunct list of an instrumented grammar, tied to it by content hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inventory {
    pub grammar_hash: String,
    pub disjuncts: Vec<DisjunctInfo>,
}

impl Inventory {
    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn get(&self, id: DisjunctId) -> Option<&DisjunctInfo> {
        self.disjuncts
            .binary_search_by_key(&id, |d| d.id)
            .ok()
            .map(|i| &self.disjuncts[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstrumentError {
    #[error("grammar is already instrumented (found marker {0})")]
    AlreadyInstrumented(DisjunctId),
    #[error("inventory line {line}: {message}")]
    InventoryFormat { line: usize, message: String },
}

/// Lists every disjunct of `g` in marker order, without rewriting anything.
pub fn enumerate_disjuncts(g: &Grammar, opts: InstrumentOptions) -> Vec<DisjunctInfo> {
    rewrite(g, opts).disjuncts
}

/// Rewrites `g` so that each disjunct records its own use.
pub fn instrument_grammar(
    g: &Grammar,
    opts: InstrumentOptions,
) -> Result<Instrumented, InstrumentError> {
    if let Some(id) = g.markers().first() {
        return Err(InstrumentError::AlreadyInstrumented(*id));
    }
    Ok(rewrite(g, opts))
}

fn rewrite(g: &Grammar, opts: InstrumentOptions) -> Instrumented {
    let mut w = Walker {
        next: 1,
        infos: Vec::new(),
        lhs: String::new(),
        owner: LocusOwner::Rule(0),
    };
    let mut out = g.clone();
    for (r, rule) in g.rules.iter().enumerate() {
        w.lhs = rule.lhs.clone();
        w.owner = LocusOwner::Rule(r);
        out.rules[r].rhs = w.items(&rule.rhs, &mut Vec::new());
    }
    if opts.include_lexicon {
        for (l, entry) in g.lexicon.iter().enumerate() {
            w.lhs = entry.category.clone();
            w.owner = LocusOwner::Lexicon(l);
            let mut path = Vec::new();
            let mut anns = w.annotations(&entry.annotations, &mut path);
            anns.push(Annotation::Marker(w.alloc(DisjunctKind::LexicalEntry, &path)));
            out.lexicon[l].annotations = anns;
        }
    }
    Instrumented {
        grammar: out,
        disjuncts: w.infos,
    }
}

struct Walker {
    next: u32,
    infos: Vec<DisjunctInfo>,
    lhs: String,
    owner: LocusOwner,
}

impl Walker {
    fn alloc(&mut self, kind: DisjunctKind, path: &[LocusStep]) -> DisjunctId {
        let id = DisjunctId(self.next);
        self.next += 1;
        self.infos.push(DisjunctInfo {
            id,
            rule_lhs: self.lhs.clone(),
            kind,
            locus: Locus {
                owner: self.owner,
                steps: path.to_vec(),
            },
        });
        id
    }

    fn items(&mut self, items: &[RhsItem], path: &mut Vec<LocusStep>) -> Vec<RhsItem> {
        items
            .iter()
            .enumerate()
            .map(|(k, item)| {
                path.push(LocusStep::Item(k));
                let out = self.item(item, path);
                path.pop();
                out
            })
            .collect()
    }

    fn item(&mut self, item: &RhsItem, path: &mut Vec<LocusStep>) -> RhsItem {
        match item {
            RhsItem::Element(el) => match el.repetition {
                Repetition::One | Repetition::Plus => RhsItem::Element(Element {
                    annotations: self.annotations(&el.annotations, path),
                    ..el.clone()
                }),
                Repetition::Optional => {
                    let absent = self.alloc(DisjunctKind::OptionalityAbsent, path);
                    let mut anns = self.annotations(&el.annotations, path);
                    let present = self.alloc(DisjunctKind::OptionalityPresent, path);
                    anns.push(Annotation::Marker(present));
                    RhsItem::Disjunction(vec![
                        vec![RhsItem::Empty(vec![Annotation::Marker(absent)])],
                        vec![RhsItem::Element(Element {
                            category: el.category.clone(),
                            repetition: Repetition::One,
                            annotations: anns,
                        })],
                    ])
                }
                Repetition::Star => {
                    let zero = self.alloc(DisjunctKind::IterationZero, path);
                    let mut anns = self.annotations(&el.annotations, path);
                    // Annotation branches already tell the occurrences apart.
                    let branching = el
                        .annotations
                        .iter()
                        .any(|a| matches!(a, Annotation::Disjunction(_)));
                    if !branching {
                        let some = self.alloc(DisjunctKind::IterationSome, path);
                        anns.push(Annotation::Marker(some));
                    }
                    RhsItem::Disjunction(vec![
                        vec![RhsItem::Empty(vec![Annotation::Marker(zero)])],
                        vec![RhsItem::Element(Element {
                            category: el.category.clone(),
                            repetition: Repetition::Plus,
                            annotations: anns,
                        })],
                    ])
                }
            },
            RhsItem::Empty(anns) => RhsItem::Empty(self.annotations(anns, path)),
            RhsItem::Disjunction(branches) => {
                let mut out = Vec::with_capacity(branches.len());
                for (b, branch) in branches.iter().enumerate() {
                    path.push(LocusStep::Branch(b));
                    let mut items = self.items(branch, path);
                    let id = self.alloc(DisjunctKind::PsBranch, path);
                    attach_trailing(&mut items, id);
                    path.pop();
                    out.push(items);
                }
                RhsItem::Disjunction(out)
            }
        }
    }

    fn annotations(&mut self, anns: &[Annotation], path: &mut Vec<LocusStep>) -> Vec<Annotation> {
        let mut out = Vec::with_capacity(anns.len());
        for (k, ann) in anns.iter().enumerate() {
            path.push(LocusStep::Annotation(k));
            match ann {
                Annotation::Disjunction(branches) => {
                    let mut new = Vec::with_capacity(branches.len());
                    for (b, branch) in branches.iter().enumerate() {
                        path.push(LocusStep::Branch(b));
                        let mut inner = self.annotations(branch, path);
                        let id = self.alloc(DisjunctKind::AnnotationBranch, path);
                        inner.push(Annotation::Marker(id));
                        path.pop();
                        new.push(inner);
                    }
                    out.push(Annotation::Disjunction(new));
                }
                other => out.push(other.clone()),
            }
            path.pop();
        }
        out
    }
}

/// A branch marker must fire exactly once per use of the branch, so it can
/// only ride on a trailing constituent that occurs exactly once.
fn attach_trailing(items: &mut Vec<RhsItem>, id: DisjunctId) {
    match items.last_mut() {
        Some(RhsItem::Element(el)) if el.repetition == Repetition::One => {
            el.annotations.push(Annotation::Marker(id))
        }
        Some(RhsItem::Empty(anns)) => anns.push(Annotation::Marker(id)),
        _ => items.push(RhsItem::Empty(vec![Annotation::Marker(id)])),
    }
}

/// One line per disjunct: `id<TAB>rule_lhs<TAB>kind<TAB>locus`.
pub fn render_inventory_tsv(disjuncts: &[DisjunctInfo]) -> String {
    let mut sorted: Vec<&DisjunctInfo> = disjuncts.iter().collect();
    sorted.sort_by_key(|d| d.id);
    let mut out = String::new();
    for d in sorted {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", d.id, d.rule_lhs, d.kind, d.locus));
    }
    out
}

pub fn parse_inventory_tsv(text: &str) -> Result<Vec<DisjunctInfo>, InstrumentError> {
    let mut out: Vec<DisjunctInfo> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| InstrumentError::InventoryFormat {
            line: n + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        let id: DisjunctId = fields[0].parse().map_err(|e: ParseIdError| err(e.to_string()))?;
        if let Some(prev) = out.last() {
            if prev.id >= id {
                return Err(err(format!("{id} is out of order")));
            }
        }
        out.push(DisjunctInfo {
            id,
            rule_lhs: fields[1].to_string(),
            kind: fields[2].parse().map_err(err)?,
            locus: fields[3].parse().map_err(err)?,
        });
    }
    Ok(out)
}
