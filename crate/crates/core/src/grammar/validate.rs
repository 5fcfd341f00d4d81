use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::{Annotation, Grammar, RhsItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticKind {
    /// An annotation path uses an attribute missing from `features:`.
    UndeclaredFunction,
    /// A right-hand-side category has neither a rule nor a lexical entry.
    UndefinedCategory,
    /// A rule cannot be reached from the start symbol.
    UnreachableRule,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::UndeclaredFunction => "undeclared-function",
            DiagnosticKind::UndefinedCategory => "undefined-category",
            DiagnosticKind::UnreachableRule => "unreachable-rule",
        }
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// `rule VP` or `lexicon wine`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning[{}] {}: {}", self.kind, self.location, self.message)
    }
}

/// Static checks that never block processing.
pub fn validate(g: &Grammar) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for rule in &g.rules {
        let location = format!("rule {}", rule.lhs);
        let mut attrs = Vec::new();
        let mut cats = Vec::new();
        walk_items(&rule.rhs, &mut attrs, &mut cats);
        undeclared(g, &location, &attrs, &mut out);

        let mut reported = BTreeSet::new();
        for cat in cats {
            if g.rule(&cat).is_none() && !g.is_lexical_category(&cat) && reported.insert(cat.clone())
            {
                out.push(Diagnostic {
                    kind: DiagnosticKind::UndefinedCategory,
                    location: location.clone(),
                    message: format!("category {cat} has no rule and no lexical entry"),
                });
            }
        }
    }

    for entry in &g.lexicon {
        let mut attrs = Vec::new();
        walk_annotations(&entry.annotations, &mut attrs);
        undeclared(g, &format!("lexicon {}", entry.surface), &attrs, &mut out);
    }

    let reachable = reachable_categories(g);
    for rule in &g.rules {
        if !reachable.contains(rule.lhs.as_str()) {
            out.push(Diagnostic {
                kind: DiagnosticKind::UnreachableRule,
                location: format!("rule {}", rule.lhs),
                message: format!("not reachable from start symbol {}", g.start_symbol),
            });
        }
    }
    out
}

fn undeclared(g: &Grammar, location: &str, attrs: &[String], out: &mut Vec<Diagnostic>) {
    let mut reported = BTreeSet::new();
    for a in attrs {
        if !g.declared_functions.contains(a) && reported.insert(a.clone()) {
            out.push(Diagnostic {
                kind: DiagnosticKind::UndeclaredFunction,
                location: location.to_string(),
                message: format!("attribute {a} is not declared in `features:`"),
            });
        }
    }
}

fn walk_items(items: &[RhsItem], attrs: &mut Vec<String>, cats: &mut Vec<String>) {
    for item in items {
        match item {
            RhsItem::Element(el) => {
                cats.push(el.category.clone());
                walk_annotations(&el.annotations, attrs);
            }
            RhsItem::Empty(anns) => walk_annotations(anns, attrs),
            RhsItem::Disjunction(branches) => {
                for b in branches {
                    walk_items(b, attrs, cats);
                }
            }
        }
    }
}

fn walk_annotations(anns: &[Annotation], attrs: &mut Vec<String>) {
    for ann in anns {
        match ann {
            Annotation::PathEq(l, r) | Annotation::Membership(l, r) => {
                attrs.extend(l.attrs.iter().cloned());
                attrs.extend(r.attrs.iter().cloned());
            }
            Annotation::AtomEq(p, _) | Annotation::NonExistence(p) => {
                attrs.extend(p.attrs.iter().cloned())
            }
            Annotation::Disjunction(bs) => {
                for b in bs {
                    walk_annotations(b, attrs);
                }
            }
            Annotation::Marker(_) => {}
        }
    }
}

fn reachable_categories(g: &Grammar) -> BTreeSet<&str> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([g.start_symbol.as_str()]);
    while let Some(cat) = queue.pop_front() {
        if !seen.insert(cat) {
            continue;
        }
        if let Some(rule) = g.rule(cat) {
            let mut cats = Vec::new();
            walk_items(&rule.rhs, &mut Vec::new(), &mut cats);
            for c in cats {
                if let Some(r) = g.rule(&c) {
                    queue.push_back(r.lhs.as_str());
                }
            }
        }
    }
    seen
}
