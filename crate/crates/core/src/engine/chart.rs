//! Packed recognition chart over the backbone.

use std::cell::RefCell;
use std::collections::HashMap;

use super::compile::{Automaton, CatId, CompiledGrammar, Label};

pub(crate) struct Chart {
    n: usize,
    cells: Vec<bool>,
}

impl Chart {
    fn idx(&self, cat: CatId, i: usize, j: usize) -> usize {
        (cat * (self.n + 1) + i) * (self.n + 1) + j
    }

    pub fn get(&self, cat: CatId, i: usize, j: usize) -> bool {
        self.cells[self.idx(cat, i, j)]
    }

    fn set(&mut self, cat: CatId, i: usize, j: usize) -> bool {
        let k = self.idx(cat, i, j);
        !std::mem::replace(&mut self.cells[k], true)
    }

    /// Whether an edge can span `p..q`.
    pub fn edge_fits(&self, label: Label, repeated: bool, p: usize, q: usize) -> bool {
        match label {
            Label::Epsilon => p == q,
            Label::Consume(x) => self.get(x, p, q) && (q > p || !repeated),
        }
    }
}

/// Fills the chart right to left; spans sharing a start position are closed
/// under unary and empty derivations by iterating to a fixpoint.
pub(crate) fn recognize(g: &CompiledGrammar, lexical: &[Vec<usize>]) -> Chart {
    let n = lexical.len();
    let mut chart = Chart {
        n,
        cells: vec![false; g.n_categories() * (n + 1) * (n + 1)],
    };
    for i in (0..=n).rev() {
        if i < n {
            for &entry in &lexical[i] {
                chart.set(g.lexical_cat[entry], i, i + 1);
            }
        }
        loop {
            let mut changed = false;
            for rule in &g.rules {
                for j in rule_ends(&rule.automaton, i, &chart) {
                    changed |= chart.set(rule.lhs, i, j);
                }
            }
            if !changed {
                break;
            }
        }
    }
    chart
}

fn rule_ends(a: &Automaton, i: usize, chart: &Chart) -> Vec<usize> {
    let n = chart.n;
    let mut reach = vec![vec![false; a.n_states()]; n + 1];
    reach[i][a.start] = true;
    let mut ends = Vec::new();
    for p in i..=n {
        let mut stack: Vec<usize> = (0..a.n_states()).filter(|&s| reach[p][s]).collect();
        while let Some(s) = stack.pop() {
            for &e in &a.out[s] {
                let edge = &a.edges[e];
                for q in p..=n {
                    if !chart.edge_fits(edge.label, edge.repeated, p, q) {
                        continue;
                    }
                    if !reach[q][edge.to] {
                        reach[q][edge.to] = true;
                        if q == p {
                            stack.push(edge.to);
                        }
                    }
                    if edge.label == Label::Epsilon {
                        break;
                    }
                }
            }
        }
        if reach[p][a.accept] {
            ends.push(p);
        }
    }
    ends
}

/// For each rule and end position, the automaton configurations from which
/// the accept state can still be reached exactly at that end.
pub(crate) struct LiveTables<'c> {
    chart: &'c Chart,
    memo: RefCell<HashMap<(usize, usize), std::rc::Rc<Vec<Vec<bool>>>>>,
}

impl<'c> LiveTables<'c> {
    pub fn new(chart: &'c Chart) -> Self {
        LiveTables {
            chart,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn get(&self, g: &CompiledGrammar, rule: usize, j: usize) -> std::rc::Rc<Vec<Vec<bool>>> {
        if let Some(t) = self.memo.borrow().get(&(rule, j)) {
            return t.clone();
        }
        let a = &g.rules[rule].automaton;
        let mut live = vec![vec![false; a.n_states()]; j + 1];
        live[j][a.accept] = true;
        for p in (0..=j).rev() {
            loop {
                let mut changed = false;
                for s in 0..a.n_states() {
                    if live[p][s] {
                        continue;
                    }
                    let ok = a.out[s].iter().any(|&e| {
                        let edge = &a.edges[e];
                        (p..=j).any(|q| {
                            live[q][edge.to] && self.chart.edge_fits(edge.label, edge.repeated, p, q)
                        })
                    });
                    if ok {
                        live[p][s] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        let t = std::rc::Rc::new(live);
        self.memo.borrow_mut().insert((rule, j), t.clone());
        t
    }
}
