use std::fmt::Write;

use gga_core::AtomicDistribution;

use crate::graph::{NodeId, NodeKind, OpCode, ProgramGraph};

const INLINE_DEPTH: usize = 6;

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Source,
    Label,
}

pub fn render_dist(d: &AtomicDistribution) -> String {
    let args: Vec<String> = d.params.iter().map(|p| p.to_string()).collect();
    format!("{}({})", d.family.name(), args.join(", "))
}

impl ProgramGraph {
    /// Prints the graph back as a model in the surface syntax.
    pub fn to_source(&self) -> String {
        let mut out = format!("model {} {{\n", self.name);
        for n in &self.nodes {
            if n.template_of.is_some() {
                continue;
            }
            let name = self.source_name(n.id);
            match &n.kind {
                NodeKind::Draw(d) => writeln!(out, "  {name} ~ {}", render_dist(d)).unwrap(),
                NodeKind::Constant(c) => writeln!(out, "  {name} = {c}").unwrap(),
                NodeKind::Op { .. } => writeln!(out, "  {name} = {}", self.render_def(n.id, Mode::Source, 0).0).unwrap(),
            }
        }
        for n in &self.nodes {
            if n.observed {
                writeln!(out, "  observe {}", self.source_name(n.id)).unwrap();
            }
        }
        for n in &self.nodes {
            if n.queried {
                writeln!(out, "  query {}", self.source_name(n.id)).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }

    /// Printable defining expression of a node.
    pub fn expr_label(&self, id: NodeId) -> String {
        self.render_def(id, Mode::Label, 0).0
    }

    fn source_name(&self, id: NodeId) -> String {
        self.nodes[id].name.clone().unwrap_or_else(|| format!("_n{id}"))
    }

    fn render_ref(&self, id: NodeId, mode: Mode, depth: usize) -> (String, u8) {
        let n = &self.nodes[id];
        if n.template_of.is_none() {
            if let Some(name) = &n.name {
                return (name.clone(), 5);
            }
            if mode == Mode::Source {
                return (format!("_n{id}"), 5);
            }
            if depth >= INLINE_DEPTH {
                return (format!("%{id}"), 5);
            }
        }
        self.render_def(id, mode, depth + 1)
    }

    fn operand(&self, id: NodeId, min_prec: u8, mode: Mode, depth: usize) -> String {
        let (s, p) = self.render_ref(id, mode, depth);
        if p < min_prec {
            format!("({s})")
        } else {
            s
        }
    }

    /// Returns the rendered expression and its binding strength.
    fn render_def(&self, id: NodeId, mode: Mode, depth: usize) -> (String, u8) {
        let (code, parents) = match &self.nodes[id].kind {
            NodeKind::Draw(d) => return (render_dist(d), 5),
            NodeKind::Constant(c) => return (c.to_string(), if *c < 0.0 { 3 } else { 5 }),
            NodeKind::Op { code, parents } => (code, parents),
        };
        let arg = |i: usize, p: u8| self.operand(parents[i], p, mode, depth);
        let list = || parents.iter().map(|&q| self.render_ref(q, mode, depth).0).collect::<Vec<_>>().join(", ");
        match *code {
            OpCode::Add => (format!("{} + {}", arg(0, 1), arg(1, 2)), 1),
            OpCode::Sub => (format!("{} - {}", arg(0, 1), arg(1, 2)), 1),
            OpCode::Shift(c) => (format!("{} + {c}", arg(0, 1)), 1),
            OpCode::Mul => (format!("{} * {}", arg(0, 2), arg(1, 3)), 2),
            OpCode::Div => (format!("{} / {}", arg(0, 2), arg(1, 3)), 2),
            OpCode::Scale(c) => (format!("{c} * {}", arg(0, 3)), 2),
            OpCode::Neg => (format!("-{}", arg(0, 3)), 3),
            OpCode::Pow(b) => (format!("{} ^ {b}", arg(0, 5)), 4),
            OpCode::Abs => (format!("abs({})", list()), 5),
            OpCode::Recip => (format!("recip({})", list()), 5),
            OpCode::Exp => (format!("exp({})", list()), 5),
            OpCode::Log => (format!("log({})", list()), 5),
            OpCode::DensProd => (format!("dens_prod({})", list()), 5),
            OpCode::Lipschitz { l, holder } => (format!("lipschitz({l}, {holder}){{{}}}", list()), 5),
            OpCode::Iid(n) => (format!("iid({n}, {})", list()), 5),
        }
    }
}
