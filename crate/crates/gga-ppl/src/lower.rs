use std::collections::{HashMap, HashSet};

use gga_core::AtomicDistribution;

use crate::ast::{BinOp, DistCall, Expr, ExprKind, Func, Model, Span, Stmt};
use crate::error::{FrontendError, LowerError};
use crate::graph::{Node, NodeId, NodeKind, OpCode, ProgramGraph};
use crate::parser::parse;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Val {
    Const(f64),
    Node(NodeId),
}

type CseKey = ((u8, u64, u64), Vec<NodeId>);

struct Builder {
    nodes: Vec<Node>,
    cse: HashMap<CseKey, NodeId>,
    env: HashMap<String, Val>,
    defined: HashSet<String>,
    const_nodes: HashMap<String, NodeId>,
    current: Option<String>,
    in_iid: usize,
}

/// Parses and lowers in one step.
pub fn compile(src: &str) -> Result<ProgramGraph, FrontendError> {
    Ok(lower(&parse(src)?)?)
}

/// Lowers a parsed model to a folded, deduplicated, dead-code-free DAG.
pub fn lower(model: &Model) -> Result<ProgramGraph, LowerError> {
    let mut b = Builder {
        nodes: Vec::new(),
        cse: HashMap::new(),
        env: HashMap::new(),
        defined: HashSet::new(),
        const_nodes: HashMap::new(),
        current: None,
        in_iid: 0,
    };
    for s in &model.stmts {
        if let Stmt::Draw { name, .. } | Stmt::Assign { name, .. } = s {
            b.defined.insert(name.clone());
        }
    }
    for s in &model.stmts {
        b.stmt(s)?;
    }
    Ok(eliminate_dead(model.name.clone(), b.nodes))
}

fn eliminate_dead(name: String, nodes: Vec<Node>) -> ProgramGraph {
    let mut live = vec![false; nodes.len()];
    let any_roots = nodes.iter().any(|n| n.observed || n.queried);
    for n in &nodes {
        if if any_roots { n.observed || n.queried } else { n.name.is_some() } {
            live[n.id] = true;
        }
    }
    for i in (0..nodes.len()).rev() {
        if live[i] {
            for &p in nodes[i].parents() {
                live[p] = true;
            }
        }
    }
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut kept = Vec::new();
    for mut n in nodes {
        if !live[n.id] {
            continue;
        }
        remap[n.id] = kept.len();
        n.id = kept.len();
        if let NodeKind::Op { parents, .. } = &mut n.kind {
            parents.iter_mut().for_each(|p| *p = remap[*p]);
        }
        kept.push(n);
    }
    // template owners come after their bodies, so fix them up in a second pass
    for n in &mut kept {
        n.template_of = n.template_of.map(|t| remap[t]);
    }
    ProgramGraph::new(name, kept)
}

fn finite(v: f64, what: &'static str, arg: f64, span: Span) -> Result<Val, LowerError> {
    if v.is_finite() {
        Ok(Val::Const(v))
    } else {
        Err(LowerError::Domain { what, value: arg, span })
    }
}

impl Builder {
    fn push(&mut self, kind: NodeKind, span: Span) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node { id, kind, name: None, span: Some(span), observed: false, queried: false, template_of: None });
        id
    }

    fn op(&mut self, code: OpCode, parents: Vec<NodeId>, span: Span) -> Val {
        let mut key_parents = parents.clone();
        if code.is_commutative() {
            key_parents.sort_unstable();
        }
        let key = (code.key(), key_parents);
        if let Some(&id) = self.cse.get(&key) {
            return Val::Node(id);
        }
        let id = self.push(NodeKind::Op { code, parents }, span);
        self.cse.insert(key, id);
        Val::Node(id)
    }

    fn materialize(&mut self, v: Val, span: Span) -> NodeId {
        match v {
            Val::Node(id) => id,
            Val::Const(c) => self.push(NodeKind::Constant(c), span),
        }
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), LowerError> {
        match s {
            Stmt::Draw { name, dist, span } => {
                self.check_fresh(name, *span)?;
                self.current = Some(name.clone());
                let id = self.draw(dist)?;
                self.nodes[id].name = Some(name.clone());
                self.nodes[id].span = Some(*span);
                self.env.insert(name.clone(), Val::Node(id));
            }
            Stmt::Assign { name, expr, span } => {
                self.check_fresh(name, *span)?;
                self.current = Some(name.clone());
                let v = self.expr(expr)?;
                if let Val::Node(id) = v {
                    if self.nodes[id].name.is_none() {
                        self.nodes[id].name = Some(name.clone());
                        self.nodes[id].span = Some(*span);
                    }
                }
                self.env.insert(name.clone(), v);
            }
            Stmt::Observe { name, span } | Stmt::Query { name, span } => {
                self.current = None;
                let v = self.lookup(name, *span)?;
                let id = match v {
                    Val::Node(id) => id,
                    // the binding stays a constant so later uses still fold
                    Val::Const(_) => match self.const_nodes.get(name) {
                        Some(&id) => id,
                        None => {
                            let id = self.materialize(v, *span);
                            self.nodes[id].name = Some(name.clone());
                            self.const_nodes.insert(name.clone(), id);
                            id
                        }
                    },
                };
                if matches!(s, Stmt::Observe { .. }) {
                    self.nodes[id].observed = true;
                } else {
                    self.nodes[id].queried = true;
                }
            }
        }
        Ok(())
    }

    fn check_fresh(&self, name: &str, span: Span) -> Result<(), LowerError> {
        if self.env.contains_key(name) {
            return Err(LowerError::Redefined { name: name.into(), span });
        }
        Ok(())
    }

    fn lookup(&self, name: &str, span: Span) -> Result<Val, LowerError> {
        match self.env.get(name) {
            Some(&Val::Node(_)) if self.in_iid > 0 => Err(LowerError::IidCapture { name: name.into(), span }),
            Some(&v) => Ok(v),
            None if self.current.as_deref() == Some(name) || self.defined.contains(name) => {
                Err(LowerError::Cycle { name: name.into(), span })
            }
            None => Err(LowerError::Undefined { name: name.into(), span }),
        }
    }

    fn constant(&mut self, e: &Expr, what: &'static str) -> Result<f64, LowerError> {
        match self.expr(e)? {
            Val::Const(c) => Ok(c),
            Val::Node(_) => Err(LowerError::NonConstant { what, span: e.span }),
        }
    }

    fn draw(&mut self, d: &DistCall) -> Result<NodeId, LowerError> {
        let params = d
            .args
            .iter()
            .map(|a| self.constant(a, "distribution parameter"))
            .collect::<Result<Vec<_>, _>>()?;
        let dist = AtomicDistribution::new(d.family, params).map_err(|source| LowerError::Catalog { source, span: d.span })?;
        // draws are never shared
        Ok(self.push(NodeKind::Draw(dist), d.span))
    }

    fn expr(&mut self, e: &Expr) -> Result<Val, LowerError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Num(v) => Ok(Val::Const(*v)),
            ExprKind::Var(name) => self.lookup(name, span),
            ExprKind::Draw(d) => Ok(Val::Node(self.draw(d)?)),
            ExprKind::Neg(a) => Ok(match self.expr(a)? {
                Val::Const(c) => Val::Const(-c),
                Val::Node(x) => self.op(OpCode::Neg, vec![x], span),
            }),
            ExprKind::Binary { op, lhs, rhs } => {
                let (a, b) = (self.expr(lhs)?, self.expr(rhs)?);
                self.binary(*op, a, b, span)
            }
            ExprKind::Pow { base, exponent } => {
                let beta = self.constant(exponent, "exponent")?;
                match self.expr(base)? {
                    Val::Const(c) => finite(c.powf(beta), "power", c, span),
                    _ if beta == 0.0 => Ok(Val::Const(1.0)),
                    v if beta == 1.0 => Ok(v),
                    Val::Node(x) => Ok(self.op(OpCode::Pow(beta), vec![x], span)),
                }
            }
            ExprKind::Call { func, arg } => {
                let v = self.expr(arg)?;
                self.call(*func, v, span)
            }
            ExprKind::DensProd(a, b) => match (self.expr(a)?, self.expr(b)?) {
                (Val::Node(x), Val::Node(y)) => Ok(self.op(OpCode::DensProd, vec![x, y], span)),
                (Val::Node(x), Val::Const(_)) | (Val::Const(_), Val::Node(x)) => Ok(Val::Node(x)),
                _ => Err(LowerError::NoRandomOperand { what: "dens_prod", span }),
            },
            ExprKind::Lipschitz { l, holder, args } => {
                let l = self.constant(l, "lipschitz constant")?;
                let holder = match holder {
                    Some(h) => self.constant(h, "Hölder exponent")?,
                    None => 1.0,
                };
                let mut parents = Vec::new();
                for a in args {
                    if let Val::Node(x) = self.expr(a)? {
                        parents.push(x);
                    }
                }
                if parents.is_empty() {
                    return Err(LowerError::NoRandomOperand { what: "lipschitz", span });
                }
                Ok(self.op(OpCode::Lipschitz { l, holder }, parents, span))
            }
            ExprKind::Iid { count, body } => {
                let n = self.constant(count, "iid count")?;
                if !(n >= 1.0 && n.fract() == 0.0 && n <= u64::MAX as f64) {
                    return Err(LowerError::IidCount { value: n, span: count.span });
                }
                let n = n as u64;
                let start = self.nodes.len();
                self.in_iid += 1;
                let v = self.expr(body);
                self.in_iid -= 1;
                match v? {
                    Val::Const(c) => Ok(Val::Const(c * n as f64)),
                    v if n == 1 => Ok(v),
                    Val::Node(root) => {
                        let Val::Node(id) = self.op(OpCode::Iid(n), vec![root], span) else { unreachable!() };
                        self.mark_template(start, root, id);
                        Ok(Val::Node(id))
                    }
                }
            }
        }
    }

    fn mark_template(&mut self, start: usize, root: NodeId, owner: NodeId) {
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if i < start || self.nodes[i].template_of.is_some() {
                continue;
            }
            self.nodes[i].template_of = Some(owner);
            stack.extend_from_slice(self.nodes[i].parents());
        }
    }

    fn binary(&mut self, op: BinOp, a: Val, b: Val, span: Span) -> Result<Val, LowerError> {
        use Val::{Const, Node};
        Ok(match (op, a, b) {
            (BinOp::Add, Const(x), Const(y)) => Const(x + y),
            (BinOp::Sub, Const(x), Const(y)) => Const(x - y),
            (BinOp::Mul, Const(x), Const(y)) => Const(x * y),
            (BinOp::Div, Const(_), Const(y)) if y == 0.0 => return Err(LowerError::DivisionByZero { span }),
            (BinOp::Div, Const(x), Const(y)) => Const(x / y),

            (BinOp::Add, Node(x), Const(c)) | (BinOp::Add, Const(c), Node(x)) => self.shift(x, c, span),
            (BinOp::Sub, Node(x), Const(c)) => self.shift(x, -c, span),
            (BinOp::Sub, Const(c), Node(x)) => {
                let Node(n) = self.op(OpCode::Neg, vec![x], span) else { unreachable!() };
                self.shift(n, c, span)
            }
            (BinOp::Mul, Node(x), Const(c)) | (BinOp::Mul, Const(c), Node(x)) => self.scale(x, c, span)?,
            (BinOp::Div, Node(_), Const(c)) if c == 0.0 => return Err(LowerError::DivisionByZero { span }),
            (BinOp::Div, Node(x), Const(c)) => self.scale(x, 1.0 / c, span)?,
            (BinOp::Div, Const(c), Node(_)) if c == 0.0 => Const(0.0),
            (BinOp::Div, Const(c), Node(x)) => {
                let Node(r) = self.op(OpCode::Recip, vec![x], span) else { unreachable!() };
                self.scale(r, c, span)?
            }

            (BinOp::Add, Node(x), Node(y)) => self.op(OpCode::Add, vec![x, y], span),
            (BinOp::Sub, Node(x), Node(y)) => self.op(OpCode::Sub, vec![x, y], span),
            (BinOp::Mul, Node(x), Node(y)) => self.op(OpCode::Mul, vec![x, y], span),
            (BinOp::Div, Node(x), Node(y)) => self.op(OpCode::Div, vec![x, y], span),
        })
    }

    fn shift(&mut self, x: NodeId, c: f64, span: Span) -> Val {
        if c == 0.0 {
            Val::Node(x)
        } else {
            self.op(OpCode::Shift(c), vec![x], span)
        }
    }

    fn scale(&mut self, x: NodeId, c: f64, span: Span) -> Result<Val, LowerError> {
        Ok(if !c.is_finite() {
            return Err(LowerError::Domain { what: "scale", value: c, span });
        } else if c == 0.0 {
            Val::Const(0.0)
        } else if c == 1.0 {
            Val::Node(x)
        } else {
            self.op(OpCode::Scale(c), vec![x], span)
        })
    }

    fn call(&mut self, func: Func, v: Val, span: Span) -> Result<Val, LowerError> {
        let x = match v {
            Val::Const(c) => {
                return match func {
                    Func::Exp => finite(c.exp(), "exp", c, span),
                    Func::Log if c <= 0.0 => Err(LowerError::Domain { what: "log", value: c, span }),
                    Func::Log => Ok(Val::Const(c.ln())),
                    Func::Abs => Ok(Val::Const(c.abs())),
                    Func::Recip if c == 0.0 => Err(LowerError::DivisionByZero { span }),
                    Func::Recip => Ok(Val::Const(1.0 / c)),
                    Func::Sqrt if c < 0.0 => Err(LowerError::Domain { what: "sqrt", value: c, span }),
                    Func::Sqrt => Ok(Val::Const(c.sqrt())),
                }
            }
            Val::Node(x) => x,
        };
        let code = match func {
            Func::Exp => OpCode::Exp,
            Func::Log => OpCode::Log,
            Func::Abs => OpCode::Abs,
            Func::Recip => OpCode::Recip,
            Func::Sqrt => OpCode::Pow(0.5),
        };
        Ok(self.op(code, vec![x], span))
    }
}
