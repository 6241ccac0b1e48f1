//! Backward tail inference for one parameter given observed nodes.
//!
//! Observed values enter as constants, so the resulting class never depends
//! on the data. Other random draws feeding more than one observation are
//! treated as fixed parameters.

use gga_core::{Algebra64, Caveat, Tagged, TailClass64};
use serde::Serialize;
use thiserror::Error;

use crate::analyze::{Analysis, Analyzer, NodeOutcome};
use crate::graph::{NodeId, NodeKind, OpCode, ProgramGraph};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PosteriorError {
    #[error("`{0}` is not a random draw")]
    NotADraw(String),
    #[error("`{0}` is observed and cannot be the query parameter")]
    ParamObserved(String),
    #[error("`{node}` ({op}) cannot be inverted on the path to `{observed}`")]
    NonInvertiblePath { node: String, op: String, observed: String },
    #[error("the parameter reaches `{node}` through more than one operand")]
    MultiplePaths { node: String },
    #[error("class of `{node}` is unknown: {msg}")]
    UnknownClass { node: String, msg: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrectionFactor {
    pub node: NodeId,
    pub op: String,
    /// Polynomial factor `theta^exponent`, i.e. the raw class `(exponent, 1, 0)`.
    pub exponent: f64,
}

impl CorrectionFactor {
    pub fn class(&self) -> TailClass64 {
        TailClass64::gengamma(self.exponent, 1.0, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorQuery {
    pub param: NodeId,
    pub observed: Vec<NodeId>,
}

impl PosteriorQuery {
    /// Conditions on every node marked `observe` in the graph.
    pub fn new(g: &ProgramGraph, param: NodeId) -> Self {
        PosteriorQuery { param, observed: g.observed().collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorResult {
    pub class: Tagged<f64>,
    pub prior: TailClass64,
    /// Inverted class per observation that depends on the parameter.
    pub inverted: Vec<(NodeId, TailClass64)>,
    /// Inverted class times that observation's correction factors (raw).
    pub terms: Vec<(NodeId, TailClass64)>,
    pub corrections: Vec<CorrectionFactor>,
    pub visits: usize,
}

struct Chain {
    inverted: Tagged<f64>,
    corrections: Vec<CorrectionFactor>,
    visits: usize,
}

struct Context<'g> {
    g: &'g ProgramGraph,
    param: NodeId,
    bit: usize,
    analysis: Analysis,
    algebra: Algebra64,
}

impl<'g> Context<'g> {
    fn new(g: &'g ProgramGraph, param: NodeId, observed: &[NodeId]) -> Result<Self, PosteriorError> {
        if !g.nodes[param].is_draw() {
            return Err(PosteriorError::NotADraw(g.label(param)));
        }
        if observed.contains(&param) {
            return Err(PosteriorError::ParamObserved(g.label(param)));
        }
        let bit = g.draws.iter().position(|&d| d == param).expect("draws are indexed");
        let mut analyzer = Analyzer::new(g);
        for (i, &d) in g.draws.iter().enumerate() {
            let uses = observed.iter().filter(|&&o| g.ancestors[o].contains(i)).count();
            if d != param && uses >= 2 {
                analyzer = analyzer.with_override(d, TailClass64::SuperLight);
            }
        }
        let analysis = analyzer.run();
        Ok(Context { g, param, bit, analysis, algebra: Algebra64::default() })
    }

    fn sibling(&self, id: NodeId) -> Result<TailClass64, PosteriorError> {
        match &self.analysis.outcomes[id] {
            NodeOutcome::Class(t) => Ok(t.class),
            NodeOutcome::Unknown { root, msg } => Err(PosteriorError::UnknownClass { node: self.g.label(*root), msg: msg.clone() }),
        }
    }

    /// Path from the observation back to the parameter as (node, operand index) pairs.
    fn path(&self, observed: NodeId) -> Result<Vec<(NodeId, usize)>, PosteriorError> {
        let mut path = Vec::new();
        let mut cur = observed;
        while cur != self.param {
            let parents = self.g.nodes[cur].parents();
            let mut on_path = parents.iter().enumerate().filter(|(_, &p)| self.g.ancestors[p].contains(self.bit));
            let (idx, &next) = on_path.next().expect("ancestor bit implies a parent on the path");
            if on_path.next().is_some() {
                return Err(PosteriorError::MultiplePaths { node: self.g.label(cur) });
            }
            path.push((cur, idx));
            cur = next;
        }
        Ok(path)
    }

    fn chain(&self, observed: NodeId) -> Result<Option<Chain>, PosteriorError> {
        if !self.g.ancestors[observed].contains(self.bit) {
            return Ok(None);
        }
        let path = self.path(observed)?;
        let a = &self.algebra;
        let mut cur = Tagged::exact(TailClass64::SuperLight);
        let mut visits = 0;
        for &(id, idx) in &path {
            visits += 1;
            let NodeKind::Op { code, parents } = &self.g.nodes[id].kind else { unreachable!("draws have no parents") };
            let other = || self.sibling(parents[1 - idx]);
            let c = cur.class;
            let step = match *code {
                OpCode::Add | OpCode::Sub => Tagged::exact(a.add(c, other()?)),
                OpCode::Shift(s) => Tagged::exact(a.translate(c, -s)),
                OpCode::Neg => Tagged::exact(c),
                OpCode::Mul => a.divide_tagged(c, other()?),
                OpCode::Div if idx == 0 => a.multiply_tagged(c, other()?),
                // a latent divided by a constant is just rescaled
                OpCode::Div if c.is_super_light() => Tagged::exact(other()?),
                OpCode::Div => a.divide_tagged(other()?, c),
                OpCode::Scale(s) => Tagged::exact(a.scalar_mul(1.0 / s, c).expect("scale factors are nonzero")),
                OpCode::Pow(b) => a.power_tagged(c, 1.0 / b).expect("exponents are nonzero"),
                OpCode::Recip => a.reciprocal_tagged(c),
                OpCode::Exp => a.log_tagged(c),
                OpCode::Log => a.exp_tagged(c),
                OpCode::Abs | OpCode::Lipschitz { .. } | OpCode::Iid(_) | OpCode::DensProd => {
                    return Err(PosteriorError::NonInvertiblePath {
                        node: self.g.label(id),
                        op: code.to_string(),
                        observed: self.g.label(observed),
                    })
                }
            };
            cur = step.absorb(&cur.caveats);
        }
        debug_assert!(visits <= path.len());
        Ok(Some(Chain { inverted: cur, corrections: self.corrections(&path)?, visits }))
    }

    /// Jacobian factors along the path. The value at each step grows like
    /// `theta^e`; every factor is expressed as a power of theta.
    fn corrections(&self, path: &[(NodeId, usize)]) -> Result<Vec<CorrectionFactor>, PosteriorError> {
        let mut out = Vec::new();
        let mut e = 1.0_f64;
        for &(id, idx) in path.iter().rev() {
            let NodeKind::Op { code, parents } = &self.g.nodes[id].kind else { unreachable!() };
            let random_sibling = || -> Result<bool, PosteriorError> { Ok(!self.sibling(parents[1 - idx])?.is_super_light()) };
            let (k, next) = match *code {
                OpCode::Pow(b) => ((1.0 - b) * e, b * e),
                OpCode::Recip => (2.0 * e, -e),
                OpCode::Mul if random_sibling()? => (e, e),
                OpCode::Div if random_sibling()? => (e, if idx == 0 { e } else { -e }),
                OpCode::Div if idx == 1 => (2.0 * e, -e),
                OpCode::Add | OpCode::Sub | OpCode::Shift(_) => (0.0, e.max(0.0)),
                OpCode::Exp | OpCode::Log => (0.0, 0.0),
                _ => (0.0, e),
            };
            if k != 0.0 {
                out.push(CorrectionFactor { node: id, op: code.to_string(), exponent: k });
            }
            e = next;
        }
        Ok(out)
    }
}

/// Class of `f^{-1}(x, Z)` for the chain from `param` to `observed`.
pub fn invert_chain(g: &ProgramGraph, param: NodeId, observed: NodeId) -> Result<Tagged<f64>, PosteriorError> {
    let ctx = Context::new(g, param, &[observed])?;
    Ok(ctx.chain(observed)?.map_or(Tagged::exact(TailClass64::SuperLight), |c| c.inverted))
}

/// Raw product of every correction factor; `SuperLight` when there are none.
pub fn correction_product(g: &ProgramGraph, param: NodeId, observed: &[NodeId]) -> Result<TailClass64, PosteriorError> {
    let ctx = Context::new(g, param, observed)?;
    let mut acc = TailClass64::SuperLight;
    for &o in observed {
        if let Some(chain) = ctx.chain(o)? {
            for f in chain.corrections {
                acc = ctx.algebra.density_product_raw(acc, f.class()).class;
            }
        }
    }
    Ok(acc)
}

pub fn posterior_class(g: &ProgramGraph, q: &PosteriorQuery) -> Result<PosteriorResult, PosteriorError> {
    let ctx = Context::new(g, q.param, &q.observed)?;
    let prior = ctx.sibling(q.param)?;
    let a = &ctx.algebra;
    let mut acc = Tagged::exact(prior);
    let mut result =
        PosteriorResult { class: acc.clone(), prior, inverted: Vec::new(), terms: Vec::new(), corrections: Vec::new(), visits: 0 };
    for &o in &q.observed {
        let Some(chain) = ctx.chain(o)? else { continue };
        let term = chain.corrections.iter().fold(chain.inverted.class, |c, f| times_power(c, f.exponent));
        let caveats = acc.caveats.clone();
        acc = a.density_product_raw(acc.class, term).absorb(&caveats).absorb(&chain.inverted.caveats);
        result.inverted.push((o, chain.inverted.class));
        result.terms.push((o, term));
        result.corrections.extend(chain.corrections);
        result.visits += chain.visits;
    }
    acc.class = acc.class.canonicalize();
    result.class = acc;
    Ok(result)
}

/// Multiplies a density by the exact polynomial `x^k`, without canonicalizing.
pub fn times_power(c: TailClass64, k: f64) -> TailClass64 {
    match c {
        TailClass64::GenGamma { nu, sigma, rho } => TailClass64::gengamma(nu + k, sigma, rho),
        TailClass64::RegularlyVarying { alpha } => TailClass64::gengamma(k - alpha, 1.0, 0.0),
        TailClass64::SuperHeavy => TailClass64::gengamma(k - 1.0, 1.0, 0.0),
        TailClass64::SuperLight => c,
    }
}

impl PosteriorResult {
    pub fn has_caveat(&self, c: Caveat) -> bool {
        self.class.caveats.contains(&c)
    }
}
