//! Cover-vs-cover evaluation: symmetric best-match F1/Jaccard and the LFK
//! variant of overlapping normalized mutual information.
//!
//! The ONMI here follows Lancichinetti, Fortunato & Kertész (New J. Phys.
//! 2009): communities are binary node variables, each community's conditional
//! entropy is minimized over the other cover subject to the h(11)+h(00) ≥
//! h(01)+h(10) constraint, normalized per community and averaged both ways.

use crate::graph::NodeId;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// δ choices for the best-match score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delta {
    F1,
    Jaccard,
}

fn intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Pairwise set overlap score (both inputs sorted).
pub fn delta_score(a: &[NodeId], b: &[NodeId], delta: Delta) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let inter = intersection_len(a, b) as f64;
    match delta {
        Delta::F1 => 2.0 * inter / (a.len() + b.len()) as f64,
        Delta::Jaccard => {
            let union = a.len() as f64 + b.len() as f64 - inter;
            inter / union
        }
    }
}

/// Symmetric best-match average:
/// `½(avg over pred of best δ vs truth + avg over truth of best δ vs pred)`.
/// An empty cover scores 0 (the caller warns).
pub fn bi_match(pred: &[Vec<NodeId>], truth: &[Vec<NodeId>], delta: Delta) -> f64 {
    if pred.is_empty() || truth.is_empty() {
        return 0.0;
    }
    let best_against = |from: &[Vec<NodeId>], to: &[Vec<NodeId>]| -> f64 {
        let sum: f64 = from
            .par_iter()
            .map(|a| {
                to.iter()
                    .map(|b| delta_score(a, b, delta))
                    .fold(0.0, f64::max)
            })
            .sum();
        sum / from.len() as f64
    };
    0.5 * (best_against(pred, truth) + best_against(truth, pred))
}

fn h(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Entropy terms of one community viewed as a binary variable over `n` nodes.
fn community_entropy(size: usize, n: usize) -> f64 {
    let p1 = size as f64 / n as f64;
    h(p1) + h(1.0 - p1)
}

/// H(X_k | Y_l) under the LFK constraint; `None` when the pair is rejected.
fn conditional_pair(a: &[NodeId], b: &[NodeId], n: usize) -> Option<f64> {
    let nf = n as f64;
    let both = intersection_len(a, b) as f64;
    let only_a = a.len() as f64 - both;
    let only_b = b.len() as f64 - both;
    let neither = nf - both - only_a - only_b;
    let (p11, p10, p01, p00) = (both / nf, only_a / nf, only_b / nf, neither / nf);
    if h(p11) + h(p00) < h(p10) + h(p01) {
        return None;
    }
    let joint = h(p11) + h(p10) + h(p01) + h(p00);
    let hy = community_entropy(b.len(), n);
    Some(joint - hy)
}

/// Normalized conditional entropy of cover X given cover Y, in [0, 1].
fn conditional_cover(x: &[Vec<NodeId>], y: &[Vec<NodeId>], n: usize) -> f64 {
    let mut terms = Vec::with_capacity(x.len());
    for a in x {
        let hx = community_entropy(a.len(), n);
        if hx == 0.0 {
            continue;
        }
        let best = y
            .iter()
            .filter_map(|b| conditional_pair(a, b, n))
            .fold(f64::INFINITY, f64::min);
        let cond = if best.is_finite() { best.max(0.0) } else { hx };
        terms.push((cond / hx).min(1.0));
    }
    if terms.is_empty() {
        return 0.0;
    }
    terms.iter().sum::<f64>() / terms.len() as f64
}

/// Overlapping NMI in [0, 1]: 1 for identical covers, → 0 for independent
/// ones. `n` is the node-universe size; pass the graph's node count when
/// known, else the union of both covers.
pub fn onmi(pred: &[Vec<NodeId>], truth: &[Vec<NodeId>], n: usize) -> f64 {
    if pred.is_empty() || truth.is_empty() || n == 0 {
        return 0.0;
    }
    let value = 1.0 - 0.5 * (conditional_cover(pred, truth, n) + conditional_cover(truth, pred, n));
    value.clamp(0.0, 1.0)
}

/// Node-universe size implied by two covers (max id + 1).
pub fn cover_universe(pred: &[Vec<NodeId>], truth: &[Vec<NodeId>]) -> usize {
    pred.iter()
        .chain(truth)
        .flat_map(|c| c.iter())
        .map(|&v| v as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Best-match table entry: index of the best counterpart and its δ score.
#[derive(Debug, Clone, Serialize)]
pub struct MatchRow {
    pub index: usize,
    pub best: Option<usize>,
    pub f1: f64,
    pub jaccard: f64,
}

/// Full evaluation of a predicted cover against ground truth.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub f1: f64,
    pub jaccard: f64,
    pub onmi: f64,
    pub n_pred: usize,
    pub n_truth: usize,
    pub pred_matches: Vec<MatchRow>,
    pub truth_matches: Vec<MatchRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_f1: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn match_table(from: &[Vec<NodeId>], to: &[Vec<NodeId>]) -> Vec<MatchRow> {
    from.iter()
        .enumerate()
        .map(|(i, a)| {
            let mut best: Option<usize> = None;
            let mut best_f1 = 0.0;
            for (j, b) in to.iter().enumerate() {
                let s = delta_score(a, b, Delta::F1);
                if s > best_f1 {
                    best_f1 = s;
                    best = Some(j);
                }
            }
            let jac = best
                .map(|j| delta_score(a, &to[j], Delta::Jaccard))
                .unwrap_or(0.0);
            MatchRow {
                index: i,
                best,
                f1: best_f1,
                jaccard: jac,
            }
        })
        .collect()
}

/// Compute all three metrics plus per-side match tables; `universe` defaults
/// to the ids spanned by the covers.
pub fn report(
    pred: &[Vec<NodeId>],
    truth: &[Vec<NodeId>],
    universe: Option<usize>,
    reference_f1: Option<f64>,
) -> EvalReport {
    let mut warnings = Vec::new();
    if pred.is_empty() {
        warnings.push("empty predicted cover scores 0".to_string());
    }
    if truth.is_empty() {
        warnings.push("empty ground-truth cover scores 0".to_string());
    }
    let n = universe.unwrap_or_else(|| cover_universe(pred, truth));
    EvalReport {
        f1: bi_match(pred, truth, Delta::F1),
        jaccard: bi_match(pred, truth, Delta::Jaccard),
        onmi: onmi(pred, truth, n),
        n_pred: pred.len(),
        n_truth: truth.len(),
        pred_matches: match_table(pred, truth),
        truth_matches: match_table(truth, pred),
        reference_f1,
        warnings,
    }
}

impl EvalReport {
    /// Key-value text block for stdout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "predicted_communities {}", self.n_pred).unwrap();
        writeln!(out, "truth_communities     {}", self.n_truth).unwrap();
        writeln!(out, "bi_matching_f1        {:.6}", self.f1).unwrap();
        writeln!(out, "bi_matching_jaccard   {:.6}", self.jaccard).unwrap();
        writeln!(out, "onmi                  {:.6}", self.onmi).unwrap();
        for w in &self.warnings {
            writeln!(out, "warning               {w}").unwrap();
        }
        if let Some(r) = self.reference_f1 {
            writeln!(out, "reference_f1          {r:.4} (context only, not a gate)").unwrap();
        }
        out
    }
}
