use crate::graph::{NodeId, NodeKind, ProgramGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceWarning {
    pub node: NodeId,
    /// Draw node ids reachable from both operands.
    pub shared: Vec<NodeId>,
}

/// Flags binary add/sub/mul/div nodes whose operands share a stochastic ancestor.
pub fn check_independence(g: &ProgramGraph) -> Vec<IndependenceWarning> {
    let mut out = Vec::new();
    for n in &g.nodes {
        let NodeKind::Op { code, parents } = &n.kind else { continue };
        if !code.is_binary_independent() {
            continue;
        }
        let common = g.ancestors[parents[0]].intersection(&g.ancestors[parents[1]]);
        if !common.is_empty() {
            out.push(IndependenceWarning { node: n.id, shared: common.iter().map(|i| g.draws[i]).collect() });
        }
    }
    out
}
