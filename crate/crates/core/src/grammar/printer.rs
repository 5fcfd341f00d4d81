use std::fmt::Write;

use super::lexer::is_plain_ident;
use super::{Annotation, Grammar, Metavar, Path, RhsItem, EMPTY_CATEGORY};

/// Canonical text form; one rule or lexical entry per line.
pub fn print_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    out.push_str("features:");
    for f in &g.declared_functions {
        out.push(' ');
        out.push_str(f);
    }
    out.push_str(" ;\n");
    let _ = writeln!(out, "start: {} ;", g.start_symbol);
    out.push_str("rules:\n");
    for rule in &g.rules {
        let _ = writeln!(out, "  {} -> {} .", rule.lhs, items(&rule.rhs));
    }
    out.push_str("lexicon:\n");
    for entry in &g.lexicon {
        let _ = writeln!(
            out,
            "  {} {} ({}) .",
            surface(&entry.surface),
            entry.category,
            annotations(&entry.annotations)
        );
    }
    out
}

fn surface(s: &str) -> String {
    let reserved = s == EMPTY_CATEGORY || s == "in";
    if is_plain_ident(s) && !reserved {
        s.to_string()
    } else {
        let escaped = s.replace('\\', "\\\\").replace('\'', "\\'");
        format!("'{escaped}'")
    }
}

pub(crate) fn items(items: &[RhsItem]) -> String {
    items.iter().map(item).collect::<Vec<_>>().join(" ")
}

fn item(item: &RhsItem) -> String {
    match item {
        RhsItem::Element(el) => {
            let mut s = el.category.clone();
            if let Some(sym) = el.repetition.symbol() {
                s.push(' ');
                s.push(sym);
            }
            if !el.annotations.is_empty() {
                let _ = write!(s, " ({})", annotations(&el.annotations));
            }
            s
        }
        RhsItem::Empty(anns) if anns.is_empty() => EMPTY_CATEGORY.to_string(),
        RhsItem::Empty(anns) => format!("{EMPTY_CATEGORY} ({})", annotations(anns)),
        RhsItem::Disjunction(branches) => {
            let inner: Vec<String> = branches.iter().map(|b| items(b)).collect();
            format!("{{ {} }}", inner.join(" | "))
        }
    }
}

pub(crate) fn annotations(anns: &[Annotation]) -> String {
    anns.iter().map(annotation).collect::<Vec<_>>().join(" ")
}

fn annotation(ann: &Annotation) -> String {
    match ann {
        Annotation::PathEq(l, r) => format!("{} = {};", path(l), path(r)),
        Annotation::AtomEq(p, atom) => format!("{} = {atom};", path(p)),
        Annotation::Membership(e, s) => format!("{} in {};", path(e), path(s)),
        Annotation::NonExistence(p) => format!("~{};", path(p)),
        Annotation::Disjunction(branches) => {
            let inner: Vec<String> = branches.iter().map(|b| annotations(b)).collect();
            format!("{{ {} }}", inner.join(" | "))
        }
        Annotation::Marker(id) => format!("@{id};"),
    }
}

pub(crate) fn path(p: &Path) -> String {
    let mut s = String::from(match p.root {
        Metavar::Up => "^",
        Metavar::Down => "!",
    });
    for (i, a) in p.attrs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(a);
    }
    s
}
