use std::collections::{BTreeSet, HashMap, VecDeque};

use gga_core::{Algebra64, Tagged, TailClass64};

use crate::graph::{NodeId, NodeKind, OpCode, ProgramGraph};
use crate::independence::check_independence;
use crate::report::{ReportEntry, TailReport, Warning};

#[derive(Clone, Debug, PartialEq)]
pub enum NodeOutcome {
    Class(Tagged<f64>),
    /// `root` is the node where the failure originated.
    Unknown { root: NodeId, msg: String },
}

impl NodeOutcome {
    pub fn class(&self) -> Option<&TailClass64> {
        match self {
            NodeOutcome::Class(t) => Some(&t.class),
            NodeOutcome::Unknown { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub outcomes: Vec<NodeOutcome>,
    /// Shared draws behind a dependence warning, inherited from ancestors.
    pub dependence: Vec<BTreeSet<NodeId>>,
    pub visits: usize,
}

impl Analysis {
    pub fn class(&self, id: NodeId) -> Option<&TailClass64> {
        self.outcomes[id].class()
    }

    pub fn report(&self, g: &ProgramGraph) -> TailReport {
        let nodes = g
            .nodes
            .iter()
            .filter(|n| !n.is_constant())
            .map(|n| {
                let mut warnings: Vec<Warning> = Vec::new();
                let (class, error) = match &self.outcomes[n.id] {
                    NodeOutcome::Class(t) => {
                        warnings.extend(t.caveats.iter().map(|&c| Warning::from(c)));
                        (Some(t.class), None)
                    }
                    NodeOutcome::Unknown { root, msg } if *root == n.id => (None, Some(msg.clone())),
                    NodeOutcome::Unknown { root, .. } => (None, Some(format!("depends on `{}` whose class is unknown", g.label(*root)))),
                };
                if !self.dependence[n.id].is_empty() {
                    warnings.push(Warning::DependenceAssumed { shared: self.dependence[n.id].iter().map(|&d| g.label(d)).collect() });
                }
                ReportEntry { id: n.id, name: n.name.clone(), expr: g.expr_label(n.id), class, warnings, error }
            })
            .collect();
        TailReport { model: g.name.clone(), nodes }
    }
}

/// Forward tail inference over a lowered graph.
#[derive(Clone, Debug)]
pub struct Analyzer<'g> {
    g: &'g ProgramGraph,
    algebra: Algebra64,
    overrides: HashMap<NodeId, TailClass64>,
}

pub fn analyze(g: &ProgramGraph) -> TailReport {
    Analyzer::new(g).run().report(g)
}

/// Runs the pass with an explicit schedule, which must be a topological order of all nodes.
pub fn analyze_in_order(g: &ProgramGraph, order: &[NodeId]) -> Result<TailReport, String> {
    Ok(Analyzer::new(g).run_in_order(order)?.report(g))
}

impl<'g> Analyzer<'g> {
    pub fn new(g: &'g ProgramGraph) -> Self {
        Analyzer { g, algebra: Algebra64::default(), overrides: HashMap::new() }
    }

    pub fn with_algebra(mut self, algebra: Algebra64) -> Self {
        self.algebra = algebra;
        self
    }

    /// Pins a node's class instead of deriving it.
    pub fn with_override(mut self, id: NodeId, class: TailClass64) -> Self {
        self.overrides.insert(id, class);
        self
    }

    /// Breadth-first over the DAG, releasing a node once all its parent edges are processed.
    pub fn run(&self) -> Analysis {
        let g = self.g;
        let children = g.children();
        let mut indeg: Vec<usize> = g.nodes.iter().map(|n| n.parents().len()).collect();
        let mut queue: VecDeque<NodeId> = g.nodes.iter().filter(|n| n.parents().is_empty()).map(|n| n.id).collect();
        let mut state = State::new(g);
        while let Some(id) = queue.pop_front() {
            self.visit(id, &mut state);
            for &c in &children[id] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        assert_eq!(state.visits, g.len(), "every node is visited exactly once");
        state.finish()
    }

    pub fn run_in_order(&self, order: &[NodeId]) -> Result<Analysis, String> {
        let g = self.g;
        if order.len() != g.len() {
            return Err(format!("schedule has {} entries for {} nodes", order.len(), g.len()));
        }
        let mut state = State::new(g);
        for &id in order {
            if id >= g.len() || state.done[id] {
                return Err(format!("schedule repeats or overruns node {id}"));
            }
            if let Some(&p) = g.nodes[id].parents().iter().find(|&&p| !state.done[p]) {
                return Err(format!("node {id} scheduled before its parent {p}"));
            }
            self.visit(id, &mut state);
        }
        Ok(state.finish())
    }

    fn visit(&self, id: NodeId, st: &mut State) {
        let node = &self.g.nodes[id];
        st.visits += 1;
        st.done[id] = true;
        let mut dep = BTreeSet::new();
        for &p in node.parents() {
            dep.extend(st.dependence[p].iter().copied());
        }
        if let Some(shared) = st.own_dependence.remove(&id) {
            dep.extend(shared);
        }
        st.dependence[id] = dep;

        let outcome = if let Some(c) = self.overrides.get(&id) {
            NodeOutcome::Class(Tagged::exact(*c))
        } else {
            match &node.kind {
                NodeKind::Constant(_) => NodeOutcome::Class(Tagged::exact(TailClass64::SuperLight)),
                NodeKind::Draw(d) => match d.class_of::<f64>() {
                    Ok(c) => NodeOutcome::Class(Tagged::exact(c)),
                    Err(e) => NodeOutcome::Unknown { root: id, msg: e.to_string() },
                },
                NodeKind::Op { code, parents } => {
                    let mut inputs = Vec::with_capacity(parents.len());
                    let mut failed = None;
                    for &p in parents {
                        match &st.outcomes[p] {
                            NodeOutcome::Class(t) => {
                                inputs.push(t.class);
                            }
                            NodeOutcome::Unknown { root, .. } => {
                                failed = Some(*root);
                                break;
                            }
                        }
                    }
                    match failed {
                        Some(root) => NodeOutcome::Unknown { root, msg: String::new() },
                        None => match self.eval(*code, &inputs) {
                            Ok(t) => NodeOutcome::Class(t),
                            Err(msg) => NodeOutcome::Unknown { root: id, msg },
                        },
                    }
                }
            }
        };
        st.outcomes[id] = outcome;
    }

    fn eval(&self, code: OpCode, x: &[TailClass64]) -> Result<Tagged<f64>, String> {
        let a = &self.algebra;
        let exact = Tagged::exact;
        Ok(match code {
            OpCode::Add | OpCode::Sub => exact(a.add(x[0], x[1])),
            OpCode::Mul => a.multiply_tagged(x[0], x[1]),
            OpCode::Div => a.divide_tagged(x[0], x[1]),
            OpCode::Neg | OpCode::Abs => exact(x[0]),
            OpCode::Recip => a.reciprocal_tagged(x[0]),
            OpCode::Exp => a.exp_tagged(x[0]),
            OpCode::Log => a.log_tagged(x[0]),
            OpCode::Pow(b) => a.power_tagged(x[0], b).map_err(|e| e.to_string())?,
            OpCode::Scale(c) => exact(a.scalar_mul(c, x[0]).map_err(|e| e.to_string())?),
            OpCode::Shift(c) => exact(a.translate(x[0], c)),
            OpCode::Lipschitz { l, holder } => a.lipschitz_tagged(l, holder, x).map_err(|e| e.to_string())?,
            OpCode::Iid(n) => exact(a.iid_sum(x[0], n)),
            OpCode::DensProd => a.density_product_tagged(x[0], x[1]),
        })
    }
}

struct State {
    outcomes: Vec<NodeOutcome>,
    dependence: Vec<BTreeSet<NodeId>>,
    own_dependence: HashMap<NodeId, Vec<NodeId>>,
    done: Vec<bool>,
    visits: usize,
}

impl State {
    fn new(g: &ProgramGraph) -> Self {
        let n = g.len();
        State {
            outcomes: vec![NodeOutcome::Unknown { root: usize::MAX, msg: String::new() }; n],
            dependence: vec![BTreeSet::new(); n],
            own_dependence: check_independence(g).into_iter().map(|w| (w.node, w.shared)).collect(),
            done: vec![false; n],
            visits: 0,
        }
    }

    fn finish(self) -> Analysis {
        Analysis { outcomes: self.outcomes, dependence: self.dependence, visits: self.visits }
    }
}
