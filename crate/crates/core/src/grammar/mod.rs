//! The grammar formalism: a context-free backbone whose right-hand sides use
//! `?`, `*` and `+`, explicit `{ .. | .. }` alternatives, and LFG-style
//! feature annotations, together with a lexicon.
//!
//! Grammars are read with [`parse_grammar`] and written back with
//! [`print_grammar`]; the two are inverse up to whitespace and comments.

mod lexer;
mod parser;
mod printer;
mod validate;

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::instrument::DisjunctId;

pub use parser::parse_grammar;
pub use printer::print_grammar;
pub use validate::{validate, Diagnostic, DiagnosticKind};

/// Reserved category name for the empty constituent.
pub const EMPTY_CATEGORY: &str = "e";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub start_symbol: String,
    /// Attribute names that may appear in annotation paths, in declaration order.
    pub declared_functions: Vec<String>,
    /// One rule per left-hand side; repeated left-hand sides in the source are
    /// merged into a single top-level disjunction.
    pub rules: Vec<Rule>,
    pub lexicon: Vec<LexEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Vec<RhsItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RhsItem {
    Element(Element),
    /// Alternatives over RHS segments; always at least two branches.
    Disjunction(Vec<Vec<RhsItem>>),
    /// The empty category `e`, carrying only annotations.
    Empty(Vec<Annotation>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub category: String,
    pub repetition: Repetition,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Repetition {
    One,
    Optional,
    Star,
    Plus,
}

impl Repetition {
    pub fn symbol(self) -> Option<char> {
        match self {
            Repetition::One => None,
            Repetition::Optional => Some('?'),
            Repetition::Star => Some('*'),
            Repetition::Plus => Some('+'),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metavar {
    /// `^`, the mother's f-structure.
    Up,
    /// `!`, the daughter's f-structure.
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub root: Metavar,
    pub attrs: Vec<String>,
}

impl Path {
    pub fn new(root: Metavar, attrs: &[&str]) -> Self {
        Path {
            root,
            attrs: attrs.iter().map(|a| a.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotation {
    PathEq(Path, Path),
    AtomEq(Path, String),
    /// `element in set`
    Membership(Path, Path),
    NonExistence(Path),
    Disjunction(Vec<Vec<Annotation>>),
    Marker(DisjunctId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    /// Case-sensitive surface token.
    pub surface: String,
    pub category: String,
    /// Annotations over `^` only.
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

impl GrammarError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        GrammarError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

impl Grammar {
    pub fn rule(&self, lhs: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.lhs == lhs)
    }

    pub fn is_lexical_category(&self, category: &str) -> bool {
        self.lexicon.iter().any(|e| e.category == category)
    }

    /// SHA-256 over the canonical printed form, hex encoded.
    pub fn content_hash(&self) -> String {
        let text = print_grammar(self);
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Every marker in the grammar, in textual order.
    pub fn markers(&self) -> Vec<DisjunctId> {
        let mut out = Vec::new();
        for rule in &self.rules {
            collect_item_markers(&rule.rhs, &mut out);
        }
        for entry in &self.lexicon {
            collect_annotation_markers(&entry.annotations, &mut out);
        }
        out
    }
}

fn collect_item_markers(items: &[RhsItem], out: &mut Vec<DisjunctId>) {
    for item in items {
        match item {
            RhsItem::Element(el) => collect_annotation_markers(&el.annotations, out),
            RhsItem::Empty(anns) => collect_annotation_markers(anns, out),
            RhsItem::Disjunction(branches) => {
                for branch in branches {
                    collect_item_markers(branch, out);
                }
            }
        }
    }
}

pub(crate) fn collect_annotation_markers(anns: &[Annotation], out: &mut Vec<DisjunctId>) {
    for ann in anns {
        match ann {
            Annotation::Marker(id) => out.push(*id),
            Annotation::Disjunction(branches) => {
                for branch in branches {
                    collect_annotation_markers(branch, out);
                }
            }
            _ => {}
        }
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_grammar(self))
    }
}
