use std::collections::HashMap;

use gga_core::Family;

use crate::ast::{BinOp, DistCall, Expr, ExprKind, Func, Model, Span, Stmt};
use crate::error::ParseError;
use crate::lexer::{tokenize, Tok, Token};

/// Parses a single `model name { ... }` block.
pub fn parse(src: &str) -> Result<Model, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, stochastic: HashMap::new() };
    let model = p.model()?;
    p.expect_eof()?;
    Ok(model)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    // name -> whether the binding is random
    stochastic: HashMap<String, bool>,
}

fn syntax(msg: impl Into<String>, span: Span) -> ParseError {
    ParseError::Syntax { msg: msg.into(), span }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("number {v}"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<Span, ParseError> {
        let t = self.peek().clone();
        if t.tok == Tok::Sym(c) {
            self.bump();
            Ok(t.span)
        } else {
            Err(syntax(format!("expected `{c}`, found {}", describe(&t.tok)), t.span))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Span), ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            other => Err(syntax(format!("expected identifier, found {}", describe(&other)), t.span)),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let t = self.peek();
        match t.tok {
            Tok::Eof => Ok(()),
            ref other => Err(syntax(format!("unexpected {} after model block", describe(other)), t.span)),
        }
    }

    fn model(&mut self) -> Result<Model, ParseError> {
        let (kw, span) = self.expect_ident()?;
        if kw != "model" {
            return Err(syntax(format!("expected `model`, found `{kw}`"), span));
        }
        let (name, _) = self.expect_ident()?;
        self.expect_sym('{')?;
        let mut stmts = Vec::new();
        while !self.is_sym('}') {
            if self.peek().tok == Tok::Eof {
                return Err(syntax("unterminated model block", self.peek().span));
            }
            stmts.push(self.stmt()?);
        }
        self.expect_sym('}')?;
        Ok(Model { name, stmts, span })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let (head, span) = self.expect_ident()?;
        match (head.as_str(), self.peek().tok.clone()) {
            ("observe", Tok::Ident(_)) => Ok(Stmt::Observe { name: self.expect_ident()?.0, span }),
            ("query", Tok::Ident(_)) => Ok(Stmt::Query { name: self.expect_ident()?.0, span }),
            (_, Tok::Sym('~')) => {
                self.bump();
                let (fname, fspan) = self.expect_ident()?;
                let family = Family::from_name(&fname)
                    .ok_or(ParseError::UnknownDistribution { name: fname.clone(), span: fspan })?;
                let dist = self.dist_args(family, fspan)?;
                self.stochastic.insert(head.clone(), true);
                Ok(Stmt::Draw { name: head, dist, span })
            }
            (_, Tok::Sym('=')) => {
                self.bump();
                let expr = self.expr()?;
                let random = self.is_random(&expr);
                self.stochastic.insert(head.clone(), random);
                Ok(Stmt::Assign { name: head, expr, span })
            }
            (_, other) => Err(syntax(format!("expected `~` or `=` after `{head}`, found {}", describe(&other)), self.peek().span)),
        }
    }

    fn is_random(&self, e: &Expr) -> bool {
        let mut random = e.contains_draw();
        e.visit_vars(&mut |v, _| random |= self.stochastic.get(v).copied().unwrap_or(false));
        random
    }

    fn dist_args(&mut self, family: Family, span: Span) -> Result<DistCall, ParseError> {
        let args = self.call_args()?;
        if args.len() != family.arity() {
            return Err(ParseError::Arity {
                name: family.name().into(),
                expected: family.arity().to_string(),
                got: args.len(),
                span,
            });
        }
        Ok(DistCall { family, args, span })
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_sym('(')?;
        self.expr_list(')')
    }

    fn expr_list(&mut self, close: char) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        if self.eat_sym(close) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_sym(close) {
                return Ok(args);
            }
            self.expect_sym(',')?;
        }
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.term()?;
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym('-') {
            let span = self.bump().span;
            let arg = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(arg)), span));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        let span = self.bump().span;
        // right associative: the exponent may itself be a power
        let exponent = self.unary()?;
        if self.is_random(&exponent) {
            return Err(ParseError::StochasticExponent { span: exponent.span });
        }
        Ok(Expr::new(ExprKind::Pow { base: Box::new(base), exponent: Box::new(exponent) }, span))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Expr::new(ExprKind::Num(v), t.span)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) if *self.peek_at(0) == Tok::Sym('(') => self.call(name, t.span),
            Tok::Ident(name) => Ok(Expr::new(ExprKind::Var(name), t.span)),
            other => Err(syntax(format!("expected expression, found {}", describe(&other)), t.span)),
        }
    }

    fn call(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        let arity = |got: usize, expected: &str| ParseError::Arity { name: name.clone(), expected: expected.into(), got, span };
        if let Some(func) = Func::from_name(&name) {
            let mut args = self.call_args()?;
            if args.len() != 1 {
                return Err(arity(args.len(), "1"));
            }
            return Ok(Expr::new(ExprKind::Call { func, arg: Box::new(args.remove(0)) }, span));
        }
        match name.as_str() {
            "dens_prod" => {
                let args = self.call_args()?;
                let [a, b]: [Expr; 2] = args.try_into().map_err(|a: Vec<Expr>| arity(a.len(), "2"))?;
                Ok(Expr::new(ExprKind::DensProd(Box::new(a), Box::new(b)), span))
            }
            "iid" => {
                let args = self.call_args()?;
                let [count, body]: [Expr; 2] = args.try_into().map_err(|a: Vec<Expr>| arity(a.len(), "2"))?;
                Ok(Expr::new(ExprKind::Iid { count: Box::new(count), body: Box::new(body) }, span))
            }
            "lipschitz" => {
                let mut consts = self.call_args()?;
                if consts.is_empty() || consts.len() > 2 {
                    return Err(arity(consts.len(), "1 or 2"));
                }
                let holder = (consts.len() == 2).then(|| Box::new(consts.pop().unwrap()));
                let l = Box::new(consts.pop().unwrap());
                self.expect_sym('{')?;
                let args = self.expr_list('}')?;
                if args.is_empty() {
                    return Err(syntax("lipschitz needs at least one argument", span));
                }
                Ok(Expr::new(ExprKind::Lipschitz { l, holder, args }, span))
            }
            _ => match Family::from_name(&name) {
                Some(family) => Ok(Expr::new(ExprKind::Draw(self.dist_args(family, span)?), span)),
                None => Err(ParseError::UnknownFunction { name, span }),
            },
        }
    }
}
