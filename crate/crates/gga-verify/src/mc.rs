//! Monte-Carlo checks of predicted tail classes.

use gga_core::TailClass64;
use gga_ppl::{NodeId, ProgramGraph, TailReport};
use serde::{Deserialize, Serialize};

use crate::forward::forward_sample_many;
use crate::hill::{hill_alpha, TailEstimate};
use crate::slope::gengamma_slope;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub samples: usize,
    pub seed: u64,
    pub tail_fraction: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { samples: 1_000_000, seed: 0, tail_fraction: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Power laws agree when `|alpha_hat - alpha| <= max(alpha_abs, alpha_se * stderr)`.
    pub alpha_abs: f64,
    pub alpha_se: f64,
    /// Generalized Gamma tails agree when the fitted slope is within this of 1.
    pub slope_rel: f64,
    pub band: [f64; 2],
    pub tail_fraction: f64,
}

impl Thresholds {
    pub fn new(tail_fraction: f64) -> Self {
        Thresholds { alpha_abs: 0.3, alpha_se: 3.0, slope_rel: 0.1, band: [0.95, 0.9995], tail_fraction }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeVerification {
    pub id: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub predicted: Option<TailClass64>,
    /// Density-convention exponent implied by the prediction, if a power law.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<TailEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub model: String,
    pub seed: u64,
    pub samples: usize,
    pub thresholds: Thresholds,
    pub nodes: Vec<NodeVerification>,
}

impl VerifyReport {
    pub fn node(&self, name: &str) -> Option<&NodeVerification> {
        self.nodes.iter().find(|n| n.name.as_deref() == Some(name))
    }

    pub fn all_consistent(&self) -> bool {
        self.nodes.iter().all(|n| n.verdict == Verdict::Consistent)
    }
}

/// Density exponent `alpha` when `class` is a power law.
pub fn power_alpha(class: &TailClass64) -> Option<f64> {
    match *class {
        TailClass64::RegularlyVarying { alpha } => Some(alpha),
        TailClass64::GenGamma { nu, rho, .. } if rho < 0.0 => Some(-nu),
        _ => None,
    }
}

/// Checks one predicted class against samples of the node.
pub fn verify_samples(class: &TailClass64, samples: &[f64], th: &Thresholds) -> NodeVerification {
    let mut v = NodeVerification {
        id: 0,
        name: None,
        predicted: Some(*class),
        expected_alpha: power_alpha(class),
        estimate: None,
        slope: None,
        verdict: Verdict::Inconclusive,
        note: None,
    };
    if let Some(alpha) = v.expected_alpha {
        match hill_alpha(samples, th.tail_fraction) {
            Ok(est) => {
                let tol = th.alpha_abs.max(th.alpha_se * est.stderr);
                v.verdict = if (est.alpha_hat - alpha).abs() <= tol { Verdict::Consistent } else { Verdict::Inconsistent };
                v.estimate = Some(est);
            }
            Err(e) => v.note = Some(e.to_string()),
        }
        return v;
    }
    match *class {
        TailClass64::GenGamma { nu, sigma, rho } => {
            match gengamma_slope(samples, nu, sigma, rho, th.band[0], th.band[1]) {
                Ok(s) => {
                    v.verdict = if (s - 1.0).abs() <= th.slope_rel { Verdict::Consistent } else { Verdict::Inconsistent };
                    v.slope = Some(s);
                }
                Err(e) => v.note = Some(e.to_string()),
            }
            v.estimate = hill_alpha(samples, th.tail_fraction).ok();
        }
        _ => v.note = Some("no finite tail exponent to compare".into()),
    }
    v
}

/// Nodes checked by [`mc_verify`]: queried nodes, or every named node.
pub fn verify_targets(g: &ProgramGraph) -> Vec<NodeId> {
    let q: Vec<NodeId> = g.queried().collect();
    if !q.is_empty() {
        return q;
    }
    g.nodes.iter().filter(|n| n.name.is_some() && n.template_of.is_none()).map(|n| n.id).collect()
}

/// Forward-samples the program and compares each target against its
/// predicted class. Failures become `Inconclusive` verdicts with a note.
pub fn mc_verify(g: &ProgramGraph, report: &TailReport, budget: &Budget) -> VerifyReport {
    mc_verify_nodes(g, report, budget, &verify_targets(g))
}

/// [`mc_verify`] restricted to the given nodes.
pub fn mc_verify_nodes(g: &ProgramGraph, report: &TailReport, budget: &Budget, targets: &[NodeId]) -> VerifyReport {
    let thresholds = Thresholds::new(budget.tail_fraction);
    let mut nodes = Vec::with_capacity(targets.len());
    let sampled = forward_sample_many(g, targets, budget.seed, budget.samples);
    for (j, &id) in targets.iter().enumerate() {
        let predicted = report.entry(id).and_then(|e| e.class);
        let mut v = match (&sampled, predicted) {
            (Ok(cols), Some(class)) => verify_samples(&class, &cols[j], &thresholds),
            (Err(e), _) => NodeVerification {
                id,
                name: None,
                predicted,
                expected_alpha: predicted.as_ref().and_then(power_alpha),
                estimate: None,
                slope: None,
                verdict: Verdict::Inconclusive,
                note: Some(e.to_string()),
            },
            (Ok(_), None) => NodeVerification {
                id,
                name: None,
                predicted: None,
                expected_alpha: None,
                estimate: None,
                slope: None,
                verdict: Verdict::Inconclusive,
                note: Some("no predicted class".into()),
            },
        };
        v.id = id;
        v.name = g.node(id).name.clone();
        nodes.push(v);
    }
    VerifyReport { model: g.name.clone(), seed: budget.seed, samples: budget.samples, thresholds, nodes }
}
