use std::fmt;

use gga_core::Family;
use serde::{Deserialize, Serialize};

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub name: String,
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Draw { name: String, dist: DistCall, span: Span },
    Assign { name: String, expr: Expr, span: Span },
    Observe { name: String, span: Span },
    Query { name: String, span: Span },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistCall {
    pub family: Family,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Recip,
    Sqrt,
}

impl Func {
    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "recip" => Func::Recip,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Var(String),
    /// An inline draw; every occurrence is a fresh independent variable.
    Draw(DistCall),
    Neg(Box<Expr>),
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Pow { base: Box<Expr>, exponent: Box<Expr> },
    Call { func: Func, arg: Box<Expr> },
    DensProd(Box<Expr>, Box<Expr>),
    Lipschitz { l: Box<Expr>, holder: Option<Box<Expr>>, args: Vec<Expr> },
    Iid { count: Box<Expr>, body: Box<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Calls `f` on every variable name referenced outside nested draws' own scope.
    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a str, Span)) {
        match &self.kind {
            ExprKind::Num(_) => {}
            ExprKind::Var(v) => f(v, self.span),
            ExprKind::Draw(d) => d.args.iter().for_each(|a| a.visit_vars(f)),
            ExprKind::Neg(e) | ExprKind::Call { arg: e, .. } => e.visit_vars(f),
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::DensProd(lhs, rhs) => {
                lhs.visit_vars(f);
                rhs.visit_vars(f);
            }
            ExprKind::Pow { base, exponent } => {
                base.visit_vars(f);
                exponent.visit_vars(f);
            }
            ExprKind::Lipschitz { l, holder, args } => {
                l.visit_vars(f);
                if let Some(h) = holder {
                    h.visit_vars(f);
                }
                args.iter().for_each(|a| a.visit_vars(f));
            }
            ExprKind::Iid { count, body } => {
                count.visit_vars(f);
                body.visit_vars(f);
            }
        }
    }

    pub fn contains_draw(&self) -> bool {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Var(_) => false,
            ExprKind::Draw(_) => true,
            ExprKind::Neg(e) | ExprKind::Call { arg: e, .. } => e.contains_draw(),
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::DensProd(lhs, rhs) => lhs.contains_draw() || rhs.contains_draw(),
            ExprKind::Pow { base, exponent } => base.contains_draw() || exponent.contains_draw(),
            ExprKind::Lipschitz { l, holder, args } => {
                l.contains_draw() || holder.as_ref().is_some_and(|h| h.contains_draw()) || args.iter().any(Expr::contains_draw)
            }
            ExprKind::Iid { count, body } => count.contains_draw() || body.contains_draw(),
        }
    }
}
