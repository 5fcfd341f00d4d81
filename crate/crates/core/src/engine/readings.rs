//! Tree enumeration from the chart and annotation solving per tree.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::grammar::{Annotation, Metavar, Path};

use super::chart::{recognize, Chart, LiveTables};
use super::compile::{CatId, CompiledGrammar, Label, StateId};
use super::fs::{Clash, FsGraph, NodeId};
use super::{FeatureStructure, ParseResult, Reading, Step, Tree, TreeNode, Usage};

type Flow = ControlFlow<()>;

struct Enumerator<'a> {
    g: &'a CompiledGrammar,
    tokens: &'a [String],
    lexical: &'a [Vec<usize>],
    chart: &'a Chart,
    live: LiveTables<'a>,
}

impl Enumerator<'_> {
    /// Calls `k` with every tree of `cat` over `i..j`: lexical entries first,
    /// then rules in grammar order, each rule's paths in edge order.
    fn trees(&self, cat: CatId, i: usize, j: usize, k: &mut dyn FnMut(Arc<Tree>) -> Flow) -> Flow {
        if !self.chart.get(cat, i, j) {
            return ControlFlow::Continue(());
        }
        if j == i + 1 {
            for &entry in &self.lexical[i] {
                if self.g.lexical_cat[entry] == cat {
                    k(Arc::new(Tree {
                        category: self.g.categories[cat].clone(),
                        start: i,
                        end: j,
                        node: TreeNode::Lexical {
                            entry,
                            token: self.tokens[i].clone(),
                        },
                    }))?;
                }
            }
        }
        for &rule in &self.g.rules_by_cat[cat] {
            let live = self.live.get(self.g, rule, j);
            let start = self.g.rules[rule].automaton.start;
            if !live[i][start] {
                continue;
            }
            let mut steps = Vec::new();
            self.walk(rule, &live, start, i, j, &mut steps, &mut |steps| {
                k(Arc::new(Tree {
                    category: self.g.categories[cat].clone(),
                    start: i,
                    end: j,
                    node: TreeNode::Phrase {
                        rule,
                        steps: steps.to_vec(),
                    },
                }))
            })?;
        }
        ControlFlow::Continue(())
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        rule: usize,
        live: &[Vec<bool>],
        s: StateId,
        p: usize,
        j: usize,
        steps: &mut Vec<Step>,
        k: &mut dyn FnMut(&[Step]) -> Flow,
    ) -> Flow {
        let a = &self.g.rules[rule].automaton;
        if s == a.accept {
            return k(steps);
        }
        for &e in &a.out[s] {
            let edge = &a.edges[e];
            match edge.label {
                Label::Epsilon => {
                    if live[p][edge.to] {
                        steps.push(Step { edge: e, child: None });
                        let r = self.walk(rule, live, edge.to, p, j, steps, k);
                        steps.pop();
                        r?;
                    }
                }
                Label::Consume(x) => {
                    for q in p..=j {
                        if !live[q][edge.to] || !self.chart.edge_fits(edge.label, edge.repeated, p, q) {
                            continue;
                        }
                        self.trees(x, p, q, &mut |child| {
                            steps.push(Step {
                                edge: e,
                                child: Some(child),
                            });
                            let r = self.walk(rule, live, edge.to, q, j, steps, k);
                            steps.pop();
                            r
                        })?;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// One annotation instantiated at a tree node.
#[derive(Clone, Copy)]
struct Task<'t> {
    ann: &'t Annotation,
    up: NodeId,
    down: Option<NodeId>,
}

#[derive(Clone)]
struct State<'t> {
    graph: FsGraph,
    usage: Usage,
    negations: Vec<(NodeId, &'t [String])>,
    choices: Vec<usize>,
}

fn annotations_of<'t>(g: &'t CompiledGrammar, tree: &Tree, step: &Step) -> &'t [Annotation] {
    match &tree.node {
        TreeNode::Phrase { rule, .. } => &g.rules[*rule].automaton.edges[step.edge].annotations,
        TreeNode::Lexical { .. } => &[],
    }
}

/// Instantiates the annotations of `tree` in pre-order: at each node, every
/// step's own annotations come before the daughter's subtree.
fn build_tasks<'t>(g: &'t CompiledGrammar, tree: &Tree, me: NodeId, graph: &mut FsGraph, out: &mut Vec<Task<'t>>) {
    match &tree.node {
        TreeNode::Lexical { entry, .. } => {
            for ann in &g.grammar.lexicon[*entry].annotations {
                out.push(Task { ann, up: me, down: None });
            }
        }
        TreeNode::Phrase { steps, .. } => {
            for step in steps {
                let anns = annotations_of(g, tree, step);
                if anns.is_empty() && step.child.is_none() {
                    continue;
                }
                let down = graph.new_node();
                for ann in anns {
                    out.push(Task {
                        ann,
                        up: me,
                        down: Some(down),
                    });
                }
                if let Some(child) = &step.child {
                    build_tasks(g, child, down, graph, out);
                }
            }
        }
    }
}

fn locate(graph: &mut FsGraph, t: &Task, path: &Path) -> Result<NodeId, Clash> {
    let base = match path.root {
        Metavar::Up => t.up,
        Metavar::Down => t.down.ok_or(Clash)?,
    };
    graph.resolve(base, &path.attrs)
}

fn apply<'t>(t: &Task<'t>, st: &mut State<'t>) -> Result<(), Clash> {
    match t.ann {
        Annotation::PathEq(l, r) => {
            let a = locate(&mut st.graph, t, l)?;
            let b = locate(&mut st.graph, t, r)?;
            st.graph.unify(a, b)
        }
        Annotation::AtomEq(p, atom) => {
            let a = locate(&mut st.graph, t, p)?;
            let b = st.graph.new_atom(atom);
            st.graph.unify(a, b)
        }
        Annotation::Membership(elem, set) => {
            let e = locate(&mut st.graph, t, elem)?;
            let s = locate(&mut st.graph, t, set)?;
            st.graph.add_member(s, e)
        }
        Annotation::NonExistence(p) => {
            let base = match p.root {
                Metavar::Up => t.up,
                Metavar::Down => t.down.ok_or(Clash)?,
            };
            st.negations.push((base, &p.attrs));
            Ok(())
        }
        Annotation::Marker(id) => {
            st.usage.add(*id);
            Ok(())
        }
        Annotation::Disjunction(_) => unreachable!("disjunctions are expanded by the solver"),
    }
}

/// Depth-first over annotation disjunction branches, in branch order.
fn solve<'t>(tasks: &[Task<'t>], mut st: State<'t>, k: &mut dyn FnMut(State<'t>) -> Flow) -> Flow {
    for (idx, t) in tasks.iter().enumerate() {
        if let Annotation::Disjunction(branches) = t.ann {
            let rest = &tasks[idx + 1..];
            for (b, branch) in branches.iter().enumerate() {
                let mut next = st.clone();
                next.choices.push(b);
                let sub: Vec<Task<'t>> = branch
                    .iter()
                    .map(|ann| Task {
                        ann,
                        up: t.up,
                        down: t.down,
                    })
                    .collect();
                solve(&sub, next, &mut |after| solve(rest, after, k))?;
            }
            return ControlFlow::Continue(());
        }
        if apply(t, &mut st).is_err() {
            return ControlFlow::Continue(());
        }
    }
    k(st)
}

pub(crate) fn parse_sentence(g: &CompiledGrammar, tokens: &[String], cap: usize) -> ParseResult {
    let mut result = ParseResult {
        tokens: tokens.to_vec(),
        readings: Vec::new(),
        parseable: false,
        truncated: false,
        diagnostics: Vec::new(),
    };
    let mut lexical = Vec::with_capacity(tokens.len());
    for tok in tokens {
        match g.lexicon_by_surface.get(tok) {
            Some(entries) => lexical.push(entries.clone()),
            None => {
                result.diagnostics.push(format!("unknown token `{tok}`"));
                lexical.push(Vec::new());
            }
        }
    }
    if !result.diagnostics.is_empty() {
        return result;
    }

    let n = tokens.len();
    let chart = recognize(g, &lexical);
    if !chart.get(g.start, 0, n) {
        result
            .diagnostics
            .push(format!("no constituent structure for {}", g.categories[g.start]));
        return result;
    }

    let en = Enumerator {
        g,
        tokens,
        lexical: &lexical,
        chart: &chart,
        live: LiveTables::new(&chart),
    };
    let readings = &mut result.readings;
    let truncated = &mut result.truncated;
    let _ = en.trees(g.start, 0, n, &mut |tree| {
        let mut graph = FsGraph::new();
        let root = graph.new_node();
        let mut tasks = Vec::new();
        build_tasks(g, &tree, root, &mut graph, &mut tasks);
        let st = State {
            graph,
            usage: Usage::new(),
            negations: Vec::new(),
            choices: Vec::new(),
        };
        solve(&tasks, st, &mut |st| {
            if st.negations.iter().any(|(n, attrs)| st.graph.lookup(*n, attrs).is_some()) {
                return ControlFlow::Continue(());
            }
            if readings.len() == cap {
                *truncated = true;
                return ControlFlow::Break(());
            }
            readings.push(Reading {
                tree: tree.clone(),
                choices: st.choices,
                fstruct: FeatureStructure::extract(&st.graph, root),
                usage: st.usage,
            });
            ControlFlow::Continue(())
        })
    });
    result.parseable = !result.readings.is_empty();
    if !result.parseable {
        result.diagnostics.push("no consistent f-structure".to_string());
    }
    result
}

/// Recomputes a reading's usage from its tree and choices alone, without
/// unification.
pub fn collect_usage(g: &CompiledGrammar, reading: &Reading) -> Usage {
    fn anns(list: &[Annotation], choices: &mut std::slice::Iter<usize>, usage: &mut Usage) {
        for ann in list {
            match ann {
                Annotation::Marker(id) => usage.add(*id),
                Annotation::Disjunction(branches) => {
                    if let Some(&b) = choices.next() {
                        anns(&branches[b], choices, usage);
                    }
                }
                _ => {}
            }
        }
    }
    fn walk(g: &CompiledGrammar, tree: &Tree, choices: &mut std::slice::Iter<usize>, usage: &mut Usage) {
        match &tree.node {
            TreeNode::Lexical { entry, .. } => anns(&g.grammar.lexicon[*entry].annotations, choices, usage),
            TreeNode::Phrase { steps, .. } => {
                for step in steps {
                    anns(annotations_of(g, tree, step), choices, usage);
                    if let Some(child) = &step.child {
                        walk(g, child, choices, usage);
                    }
                }
            }
        }
    }
    let mut usage = Usage::new();
    walk(g, &reading.tree, &mut reading.choices.iter(), &mut usage);
    usage
}
