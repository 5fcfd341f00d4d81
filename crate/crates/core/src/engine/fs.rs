//! Feature structures as a union-find graph.
//!
//! Nodes are created unconstrained (an empty complex value) and only grow by
//! unification, so structure sharing introduced by path equations is just
//! two paths ending at the same representative.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
enum FsNode {
    Forward(NodeId),
    Atom(String),
    /// An empty map is the unconstrained value.
    Complex(BTreeMap<String, NodeId>),
    /// Unordered bag of members.
    Set(Vec<NodeId>),
}

/// Unification failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("feature clash")]
pub struct Clash;

#[derive(Debug, Clone, Default)]
pub struct FsGraph {
    nodes: Vec<FsNode>,
}

impl FsGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_node(&mut self) -> NodeId {
        self.nodes.push(FsNode::Complex(BTreeMap::new()));
        self.nodes.len() - 1
    }

    pub fn new_atom(&mut self, atom: &str) -> NodeId {
        self.nodes.push(FsNode::Atom(atom.to_string()));
        self.nodes.len() - 1
    }

    pub fn find(&self, mut n: NodeId) -> NodeId {
        while let FsNode::Forward(next) = self.nodes[n] {
            n = next;
        }
        n
    }

    fn is_unconstrained(&self, n: NodeId) -> bool {
        matches!(&self.nodes[n], FsNode::Complex(m) if m.is_empty())
    }

    pub fn unify(&mut self, a: NodeId, b: NodeId) -> Result<(), Clash> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Ok(());
        }
        if self.is_unconstrained(a) {
            self.nodes[a] = FsNode::Forward(b);
            return Ok(());
        }
        if self.is_unconstrained(b) {
            self.nodes[b] = FsNode::Forward(a);
            return Ok(());
        }
        let taken = std::mem::replace(&mut self.nodes[a], FsNode::Forward(b));
        match (taken, &mut self.nodes[b]) {
            (FsNode::Atom(x), FsNode::Atom(y)) if x == *y => Ok(()),
            (FsNode::Set(members), FsNode::Set(other)) => {
                other.extend(members);
                Ok(())
            }
            (FsNode::Complex(attrs), FsNode::Complex(_)) => {
                for (attr, va) in attrs {
                    // `b` may have been forwarded by a cyclic sub-unification.
                    let rb = self.find(b);
                    let existing = match &mut self.nodes[rb] {
                        FsNode::Complex(m) => match m.get(&attr) {
                            Some(vb) => Some(*vb),
                            None => {
                                m.insert(attr, va);
                                None
                            }
                        },
                        FsNode::Atom(_) | FsNode::Set(_) => return Err(Clash),
                        FsNode::Forward(_) => unreachable!("find returns a representative"),
                    };
                    if let Some(vb) = existing {
                        self.unify(va, vb)?;
                    }
                }
                Ok(())
            }
            _ => Err(Clash),
        }
    }

    /// Follows `attrs` from `n`, creating unconstrained nodes on the way.
    pub fn resolve(&mut self, n: NodeId, attrs: &[String]) -> Result<NodeId, Clash> {
        let mut cur = self.find(n);
        for attr in attrs {
            let next = match &mut self.nodes[cur] {
                FsNode::Complex(m) => m.get(attr).copied(),
                _ => return Err(Clash),
            };
            cur = match next {
                Some(v) => self.find(v),
                None => {
                    let v = self.new_node();
                    match &mut self.nodes[cur] {
                        FsNode::Complex(m) => m.insert(attr.clone(), v),
                        _ => unreachable!(),
                    };
                    v
                }
            };
        }
        Ok(cur)
    }

    /// Follows `attrs` without creating anything.
    pub fn lookup(&self, n: NodeId, attrs: &[String]) -> Option<NodeId> {
        let mut cur = self.find(n);
        for attr in attrs {
            match &self.nodes[cur] {
                FsNode::Complex(m) => cur = self.find(*m.get(attr)?),
                _ => return None,
            }
        }
        Some(cur)
    }

    pub fn add_member(&mut self, set: NodeId, member: NodeId) -> Result<(), Clash> {
        let set = self.find(set);
        if self.is_unconstrained(set) {
            self.nodes[set] = FsNode::Set(vec![member]);
            return Ok(());
        }
        match &mut self.nodes[set] {
            FsNode::Set(members) => {
                members.push(member);
                Ok(())
            }
            _ => Err(Clash),
        }
    }

    /// Copies the structure reachable from `root` into `into`, returning the new root.
    fn copy_into(&self, root: NodeId, into: &mut FsGraph) -> NodeId {
        let mut map = BTreeMap::new();
        self.copy_node(root, into, &mut map)
    }

    fn copy_node(
        &self,
        n: NodeId,
        into: &mut FsGraph,
        map: &mut BTreeMap<NodeId, NodeId>,
    ) -> NodeId {
        let n = self.find(n);
        if let Some(&m) = map.get(&n) {
            return m;
        }
        let fresh = into.new_node();
        map.insert(n, fresh);
        let node = match &self.nodes[n] {
            FsNode::Atom(a) => FsNode::Atom(a.clone()),
            FsNode::Complex(attrs) => FsNode::Complex(
                attrs
                    .iter()
                    .map(|(k, v)| (k.clone(), self.copy_node(*v, into, map)))
                    .collect(),
            ),
            FsNode::Set(members) => {
                FsNode::Set(members.iter().map(|v| self.copy_node(*v, into, map)).collect())
            }
            FsNode::Forward(_) => unreachable!(),
        };
        into.nodes[fresh] = node;
        fresh
    }

    /// Canonical rendering used for structural equality.
    ///
    /// Shared substructures are unfolded, set members are deduplicated and
    /// sorted, and a back-edge into a node on the current path prints as
    /// `<cycle>`.
    pub fn render(&self, root: NodeId) -> String {
        let mut stack = BTreeSet::new();
        self.render_node(root, &mut stack)
    }

    fn render_node(&self, n: NodeId, stack: &mut BTreeSet<NodeId>) -> String {
        let n = self.find(n);
        if !stack.insert(n) {
            return "<cycle>".to_string();
        }
        let s = match &self.nodes[n] {
            FsNode::Atom(a) => a.clone(),
            FsNode::Complex(attrs) => {
                let parts: Vec<String> = attrs
                    .iter()
                    .map(|(k, v)| format!("{k}: {}", self.render_node(*v, stack)))
                    .collect();
                format!("[{}]", parts.join(", "))
            }
            FsNode::Set(members) => {
                let parts: BTreeSet<String> =
                    members.iter().map(|v| self.render_node(*v, stack)).collect();
                format!("{{{}}}", parts.into_iter().collect::<Vec<_>>().join(", "))
            }
            FsNode::Forward(_) => unreachable!(),
        };
        stack.remove(&n);
        s
    }
}

/// A rooted feature structure.
#[derive(Debug, Clone)]
pub struct FeatureStructure {
    graph: FsGraph,
    root: NodeId,
}

impl Default for FeatureStructure {
    fn default() -> Self {
        Self::new()
    }
}

impl FeatureStructure {
    /// The empty (unconstrained) structure.
    pub fn new() -> Self {
        let mut graph = FsGraph::new();
        let root = graph.new_node();
        FeatureStructure { graph, root }
    }

    /// Snapshot of the structure under `root` in `graph`.
    pub fn extract(graph: &FsGraph, root: NodeId) -> Self {
        let mut out = FsGraph::new();
        let root = graph.copy_into(root, &mut out);
        FeatureStructure { graph: out, root }
    }

    /// Reads the canonical notation: `[A: x, B: [C: y]]`, sets as `{[..], ..}`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut graph = FsGraph::new();
        let mut p = FsParser {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let root = p.value(&mut graph)?;
        if p.pos != p.chars.len() {
            return Err(format!("trailing input at {}", p.pos));
        }
        Ok(FeatureStructure { graph, root })
    }

    pub fn graph(&self) -> &FsGraph {
        &self.graph
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn get(&self, path: &[&str]) -> Option<FeatureStructure> {
        let attrs: Vec<String> = path.iter().map(|s| s.to_string()).collect();
        self.graph
            .lookup(self.root, &attrs)
            .map(|n| FeatureStructure::extract(&self.graph, n))
    }

    pub fn canonical(&self) -> String {
        self.graph.render(self.root)
    }
}

/// Least upper bound of `a` and `b`, or `None` on a clash.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Option<FeatureStructure> {
    let mut graph = FsGraph::new();
    let ra = a.graph.copy_into(a.root, &mut graph);
    let rb = b.graph.copy_into(b.root, &mut graph);
    graph.unify(ra, rb).ok()?;
    Some(FeatureStructure::extract(&graph, ra))
}

impl PartialEq for FeatureStructure {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for FeatureStructure {}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

struct FsParser {
    chars: Vec<char>,
    pos: usize,
}

impl FsParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected `{c}` at {}", self.pos))
        }
    }

    fn word(&mut self) -> Result<String, String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '-' || c == '_' || c == '+' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(format!("expected a name at {}", self.pos));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn value(&mut self, g: &mut FsGraph) -> Result<NodeId, String> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let node = g.new_node();
                let mut attrs = BTreeMap::new();
                while self.peek() != Some(']') {
                    if !attrs.is_empty() {
                        self.expect(',')?;
                    }
                    let name = self.word()?;
                    self.expect(':')?;
                    let v = self.value(g)?;
                    attrs.insert(name, v);
                }
                self.pos += 1;
                g.nodes[node] = FsNode::Complex(attrs);
                Ok(node)
            }
            Some('{') => {
                self.pos += 1;
                let mut members = Vec::new();
                while self.peek() != Some('}') {
                    if !members.is_empty() {
                        self.expect(',')?;
                    }
                    members.push(self.value(g)?);
                }
                self.pos += 1;
                g.nodes.push(FsNode::Set(members));
                Ok(g.nodes.len() - 1)
            }
            _ => {
                let atom = self.word()?;
                Ok(g.new_atom(&atom))
            }
        }
    }
}
