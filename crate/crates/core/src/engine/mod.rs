//! Two-phase parsing of test sentences.
//!
//! Phase one fills a packed context-free chart over the grammar backbone.
//! Phase two walks the chart to enumerate backbone trees in a fixed order,
//! and for every tree multiplies out the annotation disjunctions, unifying
//! as it goes. Each consistent (tree, annotation choice) pair is a
//! [`Reading`]. Disjunct markers are never unified; they are tallied in
//! the reading's [`Usage`] multiset instead.

mod chart;
mod compile;
pub mod fs;
mod readings;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::instrument::DisjunctId;

pub use compile::CompiledGrammar;
pub use fs::{unify, FeatureStructure};
pub use readings::collect_usage;

pub const DEFAULT_READING_CAP: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("category {0} can derive itself without consuming input")]
    CyclicUnaryDerivation(String),
}

/// Splits on ASCII whitespace. No case folding; punctuation must already be
/// separated.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_ascii_whitespace().map(str::to_string).collect()
}

/// Multiset of disjunct ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Usage(pub BTreeMap<DisjunctId, u32>);

impl Usage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, id: DisjunctId) {
        *self.0.entry(id).or_insert(0) += 1;
    }

    pub fn count(&self, id: DisjunctId) -> u32 {
        self.0.get(&id).copied().unwrap_or(0)
    }

    pub fn ids(&self) -> BTreeSet<DisjunctId> {
        self.0.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (DisjunctId, u32)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

impl FromIterator<(DisjunctId, u32)> for Usage {
    fn from_iter<I: IntoIterator<Item = (DisjunctId, u32)>>(iter: I) -> Self {
        let mut u = Usage::new();
        for (id, n) in iter {
            if n > 0 {
                *u.0.entry(id).or_insert(0) += n;
            }
        }
        u
    }
}

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(id, n)| format!("{id}:{n}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A backbone tree node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub category: String,
    pub start: usize,
    pub end: usize,
    pub node: TreeNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Lexical { entry: usize, token: String },
    /// `steps` is the path taken through the rule's automaton.
    Phrase { rule: usize, steps: Vec<Step> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub edge: usize,
    pub child: Option<Arc<Tree>>,
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            TreeNode::Lexical { token, .. } => write!(f, "({} {token})", self.category),
            TreeNode::Phrase { steps, .. } => {
                write!(f, "({}", self.category)?;
                for child in steps.iter().filter_map(|s| s.child.as_ref()) {
                    write!(f, " {child}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reading {
    pub tree: Arc<Tree>,
    /// Branch picked at each annotation disjunction, in evaluation order.
    pub choices: Vec<usize>,
    pub fstruct: FeatureStructure,
    pub usage: Usage,
}

#[derive(Debug, Clone)]
pub struct ParseResult {
    pub tokens: Vec<String>,
    pub readings: Vec<Reading>,
    pub parseable: bool,
    /// More readings exist than the cap allowed.
    pub truncated: bool,
    pub diagnostics: Vec<String>,
}

impl CompiledGrammar {
    /// Parses `tokens`, keeping at most `cap` readings (a cap of 0 counts as 1).
    pub fn parse_tokens(&self, tokens: &[String], cap: usize) -> ParseResult {
        readings::parse_sentence(self, tokens, cap.max(1))
    }

    pub fn parse(&self, sentence: &str, cap: usize) -> ParseResult {
        self.parse_tokens(&tokenize(sentence), cap)
    }
}

/// Free-function form of [`CompiledGrammar::parse_tokens`].
pub fn parse_sentence(g: &CompiledGrammar, tokens: &[String], cap: usize) -> ParseResult {
    g.parse_tokens(tokens, cap)
}
