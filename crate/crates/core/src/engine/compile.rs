//! Per-rule positional automata over the context-free backbone.

use std::collections::HashMap;

use crate::grammar::{Annotation, Grammar, Repetition, RhsItem};

use super::EngineError;

pub(crate) type CatId = usize;
pub(crate) type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Label {
    Consume(CatId),
    Epsilon,
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub to: StateId,
    pub label: Label,
    /// Annotations of the constituent (or `e`) this edge realizes.
    pub annotations: Vec<Annotation>,
    /// Edges of `*`/`+` occurrences must consume at least one token.
    pub repeated: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Automaton {
    pub start: StateId,
    pub accept: StateId,
    pub edges: Vec<Edge>,
    /// Outgoing edge ids per state, in construction order.
    pub out: Vec<Vec<usize>>,
}

impl Automaton {
    fn state(&mut self) -> StateId {
        self.out.push(Vec::new());
        self.out.len() - 1
    }

    fn edge(&mut self, from: StateId, to: StateId, label: Label, annotations: Vec<Annotation>, repeated: bool) {
        self.out[from].push(self.edges.len());
        self.edges.push(Edge {
            to,
            label,
            annotations,
            repeated,
        });
    }

    pub fn n_states(&self) -> usize {
        self.out.len()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledRule {
    pub lhs: CatId,
    pub automaton: Automaton,
}

/// A grammar prepared for parsing.
#[derive(Debug, Clone)]
pub struct CompiledGrammar {
    pub(crate) grammar: Grammar,
    pub(crate) categories: Vec<String>,
    pub(crate) rules: Vec<CompiledRule>,
    pub(crate) rules_by_cat: Vec<Vec<usize>>,
    pub(crate) lexicon_by_surface: HashMap<String, Vec<usize>>,
    pub(crate) lexical_cat: Vec<CatId>,
    pub(crate) start: CatId,
}

impl CompiledGrammar {
    pub fn new(grammar: &Grammar) -> Result<Self, EngineError> {
        let mut ids: HashMap<String, CatId> = HashMap::new();
        let mut categories = Vec::new();
        let mut intern = |name: &str, categories: &mut Vec<String>| -> CatId {
            *ids.entry(name.to_string()).or_insert_with(|| {
                categories.push(name.to_string());
                categories.len() - 1
            })
        };

        let mut rules = Vec::with_capacity(grammar.rules.len());
        for rule in &grammar.rules {
            let lhs = intern(&rule.lhs, &mut categories);
            let mut a = Automaton::default();
            a.start = a.state();
            let mut cat_of = |name: &str| intern(name, &mut categories);
            let start = a.start;
            a.accept = build_sequence(&mut a, start, &rule.rhs, &mut cat_of);
            rules.push(CompiledRule { lhs, automaton: a });
        }

        let mut lexicon_by_surface: HashMap<String, Vec<usize>> = HashMap::new();
        let mut lexical_cat = Vec::with_capacity(grammar.lexicon.len());
        for (i, entry) in grammar.lexicon.iter().enumerate() {
            lexical_cat.push(intern(&entry.category, &mut categories));
            lexicon_by_surface
                .entry(entry.surface.clone())
                .or_default()
                .push(i);
        }

        let start = intern(&grammar.start_symbol, &mut categories);
        let mut rules_by_cat = vec![Vec::new(); categories.len()];
        for (i, r) in rules.iter().enumerate() {
            rules_by_cat[r.lhs].push(i);
        }

        let compiled = CompiledGrammar {
            grammar: grammar.clone(),
            categories,
            rules,
            rules_by_cat,
            lexicon_by_surface,
            lexical_cat,
            start,
        };
        compiled.check_unary_cycles()?;
        Ok(compiled)
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub(crate) fn n_categories(&self) -> usize {
        self.categories.len()
    }

    /// Categories that can derive the empty string.
    fn nullable(&self) -> Vec<bool> {
        let mut nullable = vec![false; self.n_categories()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if !nullable[r.lhs] {
                    let reach = null_reach(&r.automaton, r.automaton.start, &nullable);
                    if reach[r.automaton.accept] {
                        nullable[r.lhs] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                return nullable;
            }
        }
    }

    /// Rejects grammars where a category can derive itself over the same
    /// span, which would give infinitely many trees.
    fn check_unary_cycles(&self) -> Result<(), EngineError> {
        let nullable = self.nullable();
        let n = self.n_categories();
        let mut unit: Vec<Vec<CatId>> = vec![Vec::new(); n];
        for r in &self.rules {
            let a = &r.automaton;
            let from_start = null_reach(a, a.start, &nullable);
            for s in 0..a.n_states() {
                if !from_start[s] {
                    continue;
                }
                for &e in &a.out[s] {
                    let edge = &a.edges[e];
                    if let Label::Consume(x) = edge.label {
                        if null_reach(a, edge.to, &nullable)[a.accept] && !unit[r.lhs].contains(&x) {
                            unit[r.lhs].push(x);
                        }
                    }
                }
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; n];
        fn visit(c: CatId, unit: &[Vec<CatId>], mark: &mut [u8]) -> Option<CatId> {
            mark[c] = 1;
            for &d in &unit[c] {
                if mark[d] == 1 {
                    return Some(d);
                }
                if mark[d] == 0 {
                    if let Some(hit) = visit(d, unit, mark) {
                        return Some(hit);
                    }
                }
            }
            mark[c] = 2;
            None
        }
        for c in 0..n {
            if mark[c] == 0 {
                if let Some(hit) = visit(c, &unit, &mut mark) {
                    return Err(EngineError::CyclicUnaryDerivation(self.categories[hit].clone()));
                }
            }
        }
        Ok(())
    }
}

/// States reachable from `from` without consuming input.
fn null_reach(a: &Automaton, from: StateId, nullable: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; a.n_states()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(s) = stack.pop() {
        for &e in &a.out[s] {
            let edge = &a.edges[e];
            let passable = match edge.label {
                Label::Epsilon => true,
                Label::Consume(x) => nullable[x] && !edge.repeated,
            };
            if passable && !seen[edge.to] {
                seen[edge.to] = true;
                stack.push(edge.to);
            }
        }
    }
    seen
}

fn build_sequence(
    a: &mut Automaton,
    mut from: StateId,
    items: &[RhsItem],
    cat_of: &mut dyn FnMut(&str) -> CatId,
) -> StateId {
    for item in items {
        from = build_item(a, from, item, cat_of);
    }
    from
}

// Every construction ends in a fresh state with no outgoing edges, so the
// accept state of a rule is never left again and each path is a distinct
// derivation.
fn build_item(
    a: &mut Automaton,
    from: StateId,
    item: &RhsItem,
    cat_of: &mut dyn FnMut(&str) -> CatId,
) -> StateId {
    match item {
        RhsItem::Element(el) => {
            let cat = cat_of(&el.category);
            let to = a.state();
            let anns = el.annotations.clone();
            match el.repetition {
                Repetition::One => a.edge(from, to, Label::Consume(cat), anns, false),
                Repetition::Optional => {
                    a.edge(from, to, Label::Epsilon, Vec::new(), false);
                    a.edge(from, to, Label::Consume(cat), anns, false);
                }
                Repetition::Star | Repetition::Plus => {
                    let head = a.state();
                    let tail = a.state();
                    a.edge(from, head, Label::Epsilon, Vec::new(), false);
                    if el.repetition == Repetition::Star {
                        a.edge(head, to, Label::Epsilon, Vec::new(), false);
                    }
                    a.edge(head, tail, Label::Consume(cat), anns, true);
                    a.edge(tail, head, Label::Epsilon, Vec::new(), false);
                    if el.repetition == Repetition::Plus {
                        a.edge(tail, to, Label::Epsilon, Vec::new(), false);
                    }
                }
            }
            to
        }
        RhsItem::Empty(anns) => {
            let to = a.state();
            a.edge(from, to, Label::Epsilon, anns.clone(), false);
            to
        }
        RhsItem::Disjunction(branches) => {
            let to = a.state();
            for branch in branches {
                let b = a.state();
                a.edge(from, b, Label::Epsilon, Vec::new(), false);
                let end = build_sequence(a, b, branch, cat_of);
                a.edge(end, to, Label::Epsilon, Vec::new(), false);
            }
            to
        }
    }
}
