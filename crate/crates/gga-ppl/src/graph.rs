use std::fmt;

use gga_core::AtomicDistribution;

use crate::ast::Span;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OpCode {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Abs,
    Recip,
    Exp,
    Log,
    Pow(f64),
    Scale(f64),
    Shift(f64),
    Lipschitz { l: f64, holder: f64 },
    Iid(u64),
    DensProd,
}

impl OpCode {
    /// Fixed arity, or `None` for variadic ops.
    pub fn arity(&self) -> Option<usize> {
        match self {
            OpCode::Add | OpCode::Sub | OpCode::Mul | OpCode::Div | OpCode::DensProd => Some(2),
            OpCode::Lipschitz { .. } => None,
            _ => Some(1),
        }
    }

    pub fn is_binary_independent(&self) -> bool {
        matches!(self, OpCode::Add | OpCode::Sub | OpCode::Mul | OpCode::Div)
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self, OpCode::Add | OpCode::Mul | OpCode::DensProd)
    }

    /// Hash key with float immediates compared bitwise.
    pub(crate) fn key(&self) -> (u8, u64, u64) {
        match *self {
            OpCode::Add => (0, 0, 0),
            OpCode::Sub => (1, 0, 0),
            OpCode::Mul => (2, 0, 0),
            OpCode::Div => (3, 0, 0),
            OpCode::Neg => (4, 0, 0),
            OpCode::Abs => (5, 0, 0),
            OpCode::Recip => (6, 0, 0),
            OpCode::Exp => (7, 0, 0),
            OpCode::Log => (8, 0, 0),
            OpCode::Pow(b) => (9, b.to_bits(), 0),
            OpCode::Scale(c) => (10, c.to_bits(), 0),
            OpCode::Shift(c) => (11, c.to_bits(), 0),
            OpCode::Lipschitz { l, holder } => (12, l.to_bits(), holder.to_bits()),
            OpCode::Iid(n) => (13, n, 0),
            OpCode::DensProd => (14, 0, 0),
        }
    }
}

impl fmt::Display for OpCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpCode::Add => f.write_str("add"),
            OpCode::Sub => f.write_str("sub"),
            OpCode::Mul => f.write_str("mul"),
            OpCode::Div => f.write_str("div"),
            OpCode::Neg => f.write_str("neg"),
            OpCode::Abs => f.write_str("abs"),
            OpCode::Recip => f.write_str("recip"),
            OpCode::Exp => f.write_str("exp"),
            OpCode::Log => f.write_str("log"),
            OpCode::Pow(b) => write!(f, "pow({b})"),
            OpCode::Scale(c) => write!(f, "scale({c})"),
            OpCode::Shift(c) => write!(f, "shift({c})"),
            OpCode::Lipschitz { l, holder } => write!(f, "lipschitz({l}, {holder})"),
            OpCode::Iid(n) => write!(f, "iid({n})"),
            OpCode::DensProd => f.write_str("dens_prod"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Draw(AtomicDistribution),
    Constant(f64),
    Op { code: OpCode, parents: Vec<NodeId> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub name: Option<String>,
    pub span: Option<Span>,
    pub observed: bool,
    pub queried: bool,
    /// Set on nodes that only exist as the body of an `iid` op.
    pub template_of: Option<NodeId>,
}

impl Node {
    pub fn parents(&self) -> &[NodeId] {
        match &self.kind {
            NodeKind::Op { parents, .. } => parents,
            _ => &[],
        }
    }

    pub fn is_draw(&self) -> bool {
        matches!(self.kind, NodeKind::Draw(_))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, NodeKind::Constant(_))
    }
}

/// Fixed-width set of draw indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn with_capacity(bits: usize) -> Self {
        BitSet { words: vec![0; bits.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| wi * 64 + b))
    }
}

/// Lowered program: nodes in topological order, parents before children.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramGraph {
    pub name: String,
    pub nodes: Vec<Node>,
    /// Draw node ids in order; bit `i` of an ancestor set refers to `draws[i]`.
    pub draws: Vec<NodeId>,
    pub ancestors: Vec<BitSet>,
}

impl ProgramGraph {
    pub(crate) fn new(name: String, nodes: Vec<Node>) -> Self {
        let draws: Vec<NodeId> = nodes.iter().filter(|n| n.is_draw()).map(|n| n.id).collect();
        let mut index = vec![usize::MAX; nodes.len()];
        for (i, &d) in draws.iter().enumerate() {
            index[d] = i;
        }
        let mut ancestors: Vec<BitSet> = Vec::with_capacity(nodes.len());
        for n in &nodes {
            let mut set = BitSet::with_capacity(draws.len());
            if n.is_draw() {
                set.insert(index[n.id]);
            }
            for &p in n.parents() {
                set.union_with(&ancestors[p]);
            }
            ancestors.push(set);
        }
        ProgramGraph { name, nodes, draws, ancestors }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.name.as_deref() == Some(name)).map(|n| n.id)
    }

    pub fn observed(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.observed).map(|n| n.id)
    }

    pub fn queried(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.queried).map(|n| n.id)
    }

    pub fn children(&self) -> Vec<Vec<NodeId>> {
        let mut ch = vec![Vec::new(); self.nodes.len()];
        for n in &self.nodes {
            for &p in n.parents() {
                ch[p].push(n.id);
            }
        }
        ch
    }

    /// Draw node ids that are stochastic ancestors of `id` (including itself).
    pub fn ancestor_draws(&self, id: NodeId) -> Vec<NodeId> {
        self.ancestors[id].iter().map(|i| self.draws[i]).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.parents().len()).sum()
    }

    /// Short label used in diagnostics: the node's name or `%id`.
    pub fn label(&self, id: NodeId) -> String {
        match &self.nodes[id].name {
            Some(n) => n.clone(),
            None => format!("%{id}"),
        }
    }

    /// Checks structural invariants, returning the first violation.
    pub fn validate(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(format!("node {i} has id {}", n.id));
            }
            if let NodeKind::Op { code, parents } = &n.kind {
                if parents.iter().any(|&p| p >= i) {
                    return Err(format!("node {i} has a parent that does not precede it"));
                }
                match code.arity() {
                    Some(a) if a != parents.len() => return Err(format!("node {i}: {code} expects {a} parents")),
                    None if parents.is_empty() => return Err(format!("node {i}: {code} without operands")),
                    _ => {}
                }
                if parents.iter().all(|&p| self.nodes[p].is_constant()) {
                    return Err(format!("node {i}: unfolded constant op"));
                }
            }
        }
        Ok(())
    }
}
