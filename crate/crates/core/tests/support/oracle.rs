//! Brute-force reference parser over the uninstrumented grammar.
//!
//! Enumerates derivations by trying every split of the token sequence,
//! records each choice it makes (branch taken, optional element present or
//! absent, number of iterations, annotation branch) as a (locus, kind)
//! event, and solves the annotations with a congruence-closure unifier.
//! Events are mapped to disjunct ids only at the end, through the
//! inventory, so nothing here depends on how markers are placed.

#![allow(dead_code)]

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, HashMap};

use gramcov_core::engine::Usage;
use gramcov_core::grammar::{Annotation, Grammar, Metavar, Path, Repetition, RhsItem};
use gramcov_core::instrument::{DisjunctId, DisjunctInfo, DisjunctKind, Locus, LocusOwner, LocusStep};

type Event = (LocusOwner, Vec<LocusStep>, DisjunctKind);

#[derive(Clone)]
enum Part<'g> {
    Event(Event),
    Child {
        annotations: &'g [Annotation],
        owner: LocusOwner,
        path: Vec<LocusStep>,
        tree: Box<OTree<'g>>,
    },
    Empty {
        annotations: &'g [Annotation],
        owner: LocusOwner,
        path: Vec<LocusStep>,
    },
}

#[derive(Clone)]
enum OTree<'g> {
    Lex(usize),
    Rule(Vec<Part<'g>>),
}

pub struct Oracle<'g> {
    g: &'g Grammar,
    ids: HashMap<Locus, Vec<(DisjunctKind, DisjunctId)>>,
    /// (category, span) pairs currently being derived.
    active: RefCell<Vec<(String, usize, usize)>>,
    /// Largest intermediate derivation list allowed before giving up.
    limit: Cell<usize>,
    overflow: Cell<bool>,
}

impl<'g> Oracle<'g> {
    pub fn new(g: &'g Grammar, inventory: &[DisjunctInfo]) -> Self {
        let mut ids: HashMap<Locus, Vec<(DisjunctKind, DisjunctId)>> = HashMap::new();
        for d in inventory {
            ids.entry(d.locus.clone()).or_default().push((d.kind, d.id));
        }
        Oracle {
            g,
            ids,
            active: RefCell::new(Vec::new()),
            limit: Cell::new(usize::MAX),
            overflow: Cell::new(false),
        }
    }

    fn id_of(&self, e: &Event) -> Option<DisjunctId> {
        let locus = Locus {
            owner: e.0,
            steps: e.1.clone(),
        };
        self.ids
            .get(&locus)?
            .iter()
            .find(|(k, _)| *k == e.2)
            .map(|(_, id)| *id)
    }

    /// Usage multiset of every reading, in no particular order.
    pub fn readings(&self, tokens: &[&str]) -> Vec<Usage> {
        self.readings_within(tokens, u64::MAX).expect("unbounded")
    }

    /// Like [`Oracle::readings`], but gives up (returning `None`) when the
    /// number of (tree, annotation choice) candidates would exceed `budget`.
    pub fn readings_within(&self, tokens: &[&str], budget: u64) -> Option<Vec<Usage>> {
        self.limit.set(usize::try_from(budget).unwrap_or(usize::MAX));
        self.overflow.set(false);
        let trees = self.derive(&self.g.start_symbol, tokens);
        if self.overflow.get() {
            return None;
        }
        let mut total: u64 = 0;
        let mut systems = Vec::with_capacity(trees.len());
        for tree in &trees {
            let mut sys = Instances::default();
            let root = sys.fresh();
            let mut events = Vec::new();
            self.instantiate(tree, root, &mut sys, &mut events);
            let n = sys
                .items
                .iter()
                .try_fold(1u64, |acc, i| acc.checked_mul(count_alternatives(i.anns)))?;
            total = total.checked_add(n)?;
            if total > budget {
                return None;
            }
            systems.push((sys, events));
        }
        let mut out = Vec::new();
        for (sys, events) in systems {
            for (choice_events, constraints) in expand(&sys.items) {
                if solve(sys.vars, &constraints) {
                    let usage: Usage = events
                        .iter()
                        .chain(&choice_events)
                        .filter_map(|e| self.id_of(e))
                        .map(|id| (id, 1))
                        .collect();
                    out.push(usage);
                }
            }
        }
        Some(out)
    }

    /// A category re-entered over the same span could only belong to a
    /// cyclic derivation, which grammars accepted by the engine cannot have.
    fn derive(&self, cat: &str, toks: &[&str]) -> Vec<OTree<'g>> {
        let key = (cat.to_string(), toks.as_ptr() as usize, toks.len());
        if self.overflow.get() || self.active.borrow().contains(&key) {
            return Vec::new();
        }
        self.active.borrow_mut().push(key);
        let out = self.derive_uncached(cat, toks);
        self.active.borrow_mut().pop();
        out
    }

    fn derive_uncached(&self, cat: &str, toks: &[&str]) -> Vec<OTree<'g>> {
        let mut out = Vec::new();
        if toks.len() == 1 {
            for (l, e) in self.g.lexicon.iter().enumerate() {
                if e.category == cat && e.surface == toks[0] {
                    out.push(OTree::Lex(l));
                }
            }
        }
        for (r, rule) in self.g.rules.iter().enumerate() {
            if rule.lhs == cat {
                for parts in self.seq(&rule.rhs, toks, LocusOwner::Rule(r), &[]) {
                    out.push(OTree::Rule(parts));
                }
            }
        }
        out
    }

    fn seq(&self, items: &'g [RhsItem], toks: &[&str], owner: LocusOwner, path: &[LocusStep]) -> Vec<Vec<Part<'g>>> {
        self.seq_from(items, 0, toks, owner, path)
    }

    fn seq_from(
        &self,
        items: &'g [RhsItem],
        k: usize,
        toks: &[&str],
        owner: LocusOwner,
        path: &[LocusStep],
    ) -> Vec<Vec<Part<'g>>> {
        if k == items.len() {
            return if toks.is_empty() { vec![Vec::new()] } else { Vec::new() };
        }
        let mut here = path.to_vec();
        here.push(LocusStep::Item(k));
        let mut out = Vec::new();
        for split in 0..=toks.len() {
            let firsts = self.item(&items[k], &toks[..split], owner, &here);
            if firsts.is_empty() {
                continue;
            }
            let rests = self.seq_from(items, k + 1, &toks[split..], owner, path);
            for a in &firsts {
                for b in &rests {
                    let mut v = a.clone();
                    v.extend(b.iter().cloned());
                    out.push(v);
                    if self.exceeded(out.len()) {
                        return Vec::new();
                    }
                }
            }
        }
        out
    }

    fn exceeded(&self, n: usize) -> bool {
        if n > self.limit.get() {
            self.overflow.set(true);
        }
        self.overflow.get()
    }

    fn child(&self, cat: &str, anns: &'g [Annotation], toks: &[&str], owner: LocusOwner, path: &[LocusStep]) -> Vec<Part<'g>> {
        self.derive(cat, toks)
            .into_iter()
            .map(|t| Part::Child {
                annotations: anns,
                owner,
                path: path.to_vec(),
                tree: Box::new(t),
            })
            .collect()
    }

    /// One or more non-empty occurrences covering `toks`.
    fn occurrences(
        &self,
        cat: &str,
        anns: &'g [Annotation],
        toks: &[&str],
        owner: LocusOwner,
        path: &[LocusStep],
        event: Option<DisjunctKind>,
    ) -> Vec<Vec<Part<'g>>> {
        let mut out = Vec::new();
        for k in 1..=toks.len() {
            let heads = self.child(cat, anns, &toks[..k], owner, path);
            if heads.is_empty() {
                continue;
            }
            let tails = if k == toks.len() {
                vec![Vec::new()]
            } else {
                self.occurrences(cat, anns, &toks[k..], owner, path, event)
            };
            for h in &heads {
                for t in &tails {
                    let mut v = Vec::new();
                    if let Some(kind) = event {
                        v.push(Part::Event((owner, path.to_vec(), kind)));
                    }
                    v.push(h.clone());
                    v.extend(t.iter().cloned());
                    out.push(v);
                    if self.exceeded(out.len()) {
                        return Vec::new();
                    }
                }
            }
        }
        out
    }

    fn item(&self, item: &'g RhsItem, toks: &[&str], owner: LocusOwner, path: &[LocusStep]) -> Vec<Vec<Part<'g>>> {
        let ev = |kind| Part::Event((owner, path.to_vec(), kind));
        match item {
            RhsItem::Element(el) => {
                let anns = &el.annotations[..];
                match el.repetition {
                    Repetition::One => self.child(&el.category, anns, toks, owner, path).into_iter().map(|c| vec![c]).collect(),
                    Repetition::Optional => {
                        let mut out = Vec::new();
                        if toks.is_empty() {
                            out.push(vec![ev(DisjunctKind::OptionalityAbsent)]);
                        }
                        for c in self.child(&el.category, anns, toks, owner, path) {
                            out.push(vec![ev(DisjunctKind::OptionalityPresent), c]);
                        }
                        out
                    }
                    Repetition::Star => {
                        let mut out = Vec::new();
                        if toks.is_empty() {
                            out.push(vec![ev(DisjunctKind::IterationZero)]);
                        }
                        out.extend(self.occurrences(&el.category, anns, toks, owner, path, Some(DisjunctKind::IterationSome)));
                        out
                    }
                    Repetition::Plus => self.occurrences(&el.category, anns, toks, owner, path, None),
                }
            }
            RhsItem::Empty(anns) => {
                if toks.is_empty() {
                    vec![vec![Part::Empty {
                        annotations: anns,
                        owner,
                        path: path.to_vec(),
                    }]]
                } else {
                    Vec::new()
                }
            }
            RhsItem::Disjunction(branches) => {
                let mut out = Vec::new();
                for (b, branch) in branches.iter().enumerate() {
                    let mut bp = path.to_vec();
                    bp.push(LocusStep::Branch(b));
                    for s in self.seq(branch, toks, owner, &bp) {
                        let mut v = vec![Part::Event((owner, bp.clone(), DisjunctKind::PsBranch))];
                        v.extend(s);
                        out.push(v);
                    }
                }
                out
            }
        }
    }

    fn instantiate(&self, tree: &OTree<'g>, me: usize, sys: &mut Instances<'g>, events: &mut Vec<Event>) {
        match tree {
            OTree::Lex(l) => {
                let owner = LocusOwner::Lexicon(*l);
                events.push((owner, Vec::new(), DisjunctKind::LexicalEntry));
                sys.items.push(Inst {
                    anns: &self.g.lexicon[*l].annotations,
                    owner,
                    path: Vec::new(),
                    up: me,
                    down: None,
                });
            }
            OTree::Rule(parts) => {
                for p in parts {
                    match p {
                        Part::Event(e) => events.push(e.clone()),
                        Part::Empty { annotations, owner, path } => {
                            let down = sys.fresh();
                            sys.items.push(Inst {
                                anns: annotations,
                                owner: *owner,
                                path: path.clone(),
                                up: me,
                                down: Some(down),
                            });
                        }
                        Part::Child {
                            annotations,
                            owner,
                            path,
                            tree,
                        } => {
                            let down = sys.fresh();
                            sys.items.push(Inst {
                                anns: annotations,
                                owner: *owner,
                                path: path.clone(),
                                up: me,
                                down: Some(down),
                            });
                            self.instantiate(tree, down, sys, events);
                        }
                    }
                }
            }
        }
    }
}

struct Inst<'g> {
    anns: &'g [Annotation],
    owner: LocusOwner,
    path: Vec<LocusStep>,
    up: usize,
    down: Option<usize>,
}

#[derive(Default)]
struct Instances<'g> {
    vars: usize,
    items: Vec<Inst<'g>>,
}

impl Instances<'_> {
    fn fresh(&mut self) -> usize {
        self.vars += 1;
        self.vars - 1
    }
}

/// A non-disjunctive constraint with its metavariables bound.
#[derive(Clone)]
struct Bound<'g> {
    ann: &'g Annotation,
    up: usize,
    down: Option<usize>,
}

type Alternative<'g> = (Vec<Event>, Vec<Bound<'g>>);

fn count_alternatives(anns: &[Annotation]) -> u64 {
    anns.iter()
        .map(|a| match a {
            Annotation::Disjunction(bs) => bs.iter().map(|b| count_alternatives(b)).sum(),
            _ => 1,
        })
        .fold(1u64, |acc, n| acc.saturating_mul(n))
}

/// Multiplies out annotation disjunctions.
fn expand<'g>(items: &[Inst<'g>]) -> Vec<Alternative<'g>> {
    let mut acc: Vec<Alternative<'g>> = vec![(Vec::new(), Vec::new())];
    for inst in items {
        let alts = expand_list(inst.anns, inst.owner, &inst.path, inst.up, inst.down);
        let mut next = Vec::with_capacity(acc.len() * alts.len());
        for (e0, c0) in &acc {
            for (e1, c1) in &alts {
                let mut e = e0.clone();
                e.extend(e1.iter().cloned());
                let mut c = c0.clone();
                c.extend(c1.iter().cloned());
                next.push((e, c));
            }
        }
        acc = next;
    }
    acc
}

fn expand_list<'g>(
    anns: &'g [Annotation],
    owner: LocusOwner,
    path: &[LocusStep],
    up: usize,
    down: Option<usize>,
) -> Vec<Alternative<'g>> {
    let mut acc: Vec<Alternative<'g>> = vec![(Vec::new(), Vec::new())];
    for (a, ann) in anns.iter().enumerate() {
        let alts: Vec<Alternative<'g>> = match ann {
            Annotation::Disjunction(branches) => {
                let mut v = Vec::new();
                for (b, branch) in branches.iter().enumerate() {
                    let mut bp = path.to_vec();
                    bp.push(LocusStep::Annotation(a));
                    bp.push(LocusStep::Branch(b));
                    for (mut e, c) in expand_list(branch, owner, &bp, up, down) {
                        e.insert(0, (owner, bp.clone(), DisjunctKind::AnnotationBranch));
                        v.push((e, c));
                    }
                }
                v
            }
            Annotation::Marker(_) => vec![(Vec::new(), Vec::new())],
            other => vec![(Vec::new(), vec![Bound { ann: other, up, down }])],
        };
        let mut next = Vec::new();
        for (e0, c0) in &acc {
            for (e1, c1) in &alts {
                let mut e = e0.clone();
                e.extend(e1.iter().cloned());
                let mut c = c0.clone();
                c.extend(c1.iter().cloned());
                next.push((e, c));
            }
        }
        acc = next;
    }
    acc
}

/// Congruence closure over variables, attribute edges, atom labels and set
/// memberships. Classes are kept as an explicit label per variable.
struct Closure {
    class: Vec<usize>,
    edges: Vec<(usize, String, usize)>,
    atoms: Vec<(usize, String)>,
    members: Vec<(usize, usize)>,
}

impl Closure {
    fn new(n: usize) -> Self {
        Closure {
            class: (0..n).collect(),
            edges: Vec::new(),
            atoms: Vec::new(),
            members: Vec::new(),
        }
    }

    fn var(&mut self) -> usize {
        self.class.push(self.class.len());
        self.class.len() - 1
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (ca, cb) = (self.class[a], self.class[b]);
        if ca != cb {
            for c in self.class.iter_mut() {
                if *c == cb {
                    *c = ca;
                }
            }
        }
    }

    /// Merges targets of same-attribute edges from merged sources until
    /// nothing changes, then checks for clashes.
    fn close(&mut self) -> bool {
        loop {
            let mut changed = false;
            let mut seen: BTreeMap<(usize, String), usize> = BTreeMap::new();
            for i in 0..self.edges.len() {
                let (x, a, y) = self.edges[i].clone();
                let key = (self.class[x], a);
                match seen.get(&key) {
                    Some(&z) if self.class[z] != self.class[y] => {
                        self.merge(z, y);
                        changed = true;
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(key, y);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut atom_of: HashMap<usize, &str> = HashMap::new();
        for (v, a) in &self.atoms {
            if let Some(prev) = atom_of.insert(self.class[*v], a) {
                if prev != a {
                    return false;
                }
            }
        }
        let complex: Vec<usize> = self.edges.iter().map(|e| self.class[e.0]).collect();
        let sets: Vec<usize> = self.members.iter().map(|m| self.class[m.0]).collect();
        for c in &complex {
            if atom_of.contains_key(c) || sets.contains(c) {
                return false;
            }
        }
        sets.iter().all(|c| !atom_of.contains_key(c))
    }

    fn lookup(&self, v: usize, attrs: &[String]) -> Option<usize> {
        let mut cur = v;
        for a in attrs {
            cur = self
                .edges
                .iter()
                .find(|(x, b, _)| self.class[*x] == self.class[cur] && b == a)?
                .2;
        }
        Some(cur)
    }

    fn resolve(&mut self, v: usize, attrs: &[String]) -> usize {
        let mut cur = v;
        for a in attrs {
            cur = match self.lookup(cur, std::slice::from_ref(a)) {
                Some(next) => next,
                None => {
                    let next = self.var();
                    self.edges.push((cur, a.clone(), next));
                    next
                }
            };
        }
        cur
    }
}

fn solve(vars: usize, constraints: &[Bound]) -> bool {
    let mut cc = Closure::new(vars);
    let mut negations = Vec::new();
    let base = |p: &Path, b: &Bound| match p.root {
        Metavar::Up => Some(b.up),
        Metavar::Down => b.down,
    };
    for c in constraints {
        match c.ann {
            Annotation::PathEq(l, r) => {
                let (Some(x), Some(y)) = (base(l, c), base(r, c)) else { return false };
                let x = cc.resolve(x, &l.attrs);
                let y = cc.resolve(y, &r.attrs);
                cc.merge(x, y);
            }
            Annotation::AtomEq(p, atom) => {
                let Some(x) = base(p, c) else { return false };
                let x = cc.resolve(x, &p.attrs);
                cc.atoms.push((x, atom.clone()));
            }
            Annotation::Membership(e, s) => {
                let (Some(x), Some(y)) = (base(e, c), base(s, c)) else { return false };
                let x = cc.resolve(x, &e.attrs);
                let y = cc.resolve(y, &s.attrs);
                cc.members.push((y, x));
            }
            Annotation::NonExistence(p) => {
                let Some(x) = base(p, c) else { return false };
                negations.push((x, p.attrs.clone()));
            }
            Annotation::Disjunction(_) | Annotation::Marker(_) => unreachable!(),
        }
        if !cc.close() {
            return false;
        }
    }
    negations.iter().all(|(v, attrs)| cc.lookup(*v, attrs).is_none())
}

/// Every sentence of length 1..=max_len whose first token is drawn from
/// `first` and the rest from `words`, shortest first.
pub fn sentences(first: &[&str], words: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<String>> = first.iter().map(|w| vec![w.to_string()]).collect();
    for _ in 1..=max_len {
        out.extend(layer.iter().cloned());
        let mut next = Vec::with_capacity(layer.len() * words.len());
        for s in &layer {
            for w in words {
                let mut t = s.clone();
                t.push(w.to_string());
                next.push(t);
            }
        }
        layer = next;
    }
    out
}
