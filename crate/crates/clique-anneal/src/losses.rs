//! Sample construction and the four training losses.
//!
//! Each batch is built around three labeled communities: `a1` contributes its
//! two largest cliques plus replace-/remove-distorted variants and its
//! one-hop neighborhood; pairwise unions provide the oversized negatives.
//! The losses order stored energies by hinges, tie the community embedding to
//! the fold of its top clique embeddings, budget growth through the
//! interface-energy head, and classify growth status with cross-entropy.

use crate::cliques::CliqueIndex;
use crate::encoder::{encode_subgraph, integrity_score, interface_energy, EncoderCfg, SubEmbed};
use crate::error::{Error, Result};
use crate::graph::{distort_remove, distort_replace, union_sorted, Community, Graph, NodeId};
use crate::model::ModelParams;
use crate::tape::{Tape, VarId};
use rand::Rng;

/// Loss coefficients and the hinge margin.
#[derive(Debug, Clone, Copy)]
pub struct LossWeights {
    pub gamma_e: f64,
    pub gamma_c: f64,
    pub gamma_i: f64,
    pub alpha: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            gamma_e: 1.0,
            gamma_c: 1.0,
            gamma_i: 1.0,
            alpha: 0.1,
        }
    }
}

/// One training sample: the three communities, `a1`'s top cliques, and every
/// derived subgraph the losses touch.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub a1: Vec<NodeId>,
    pub a2: Vec<NodeId>,
    pub a3: Vec<NodeId>,
    pub b: Vec<NodeId>,
    pub c: Vec<NodeId>,
    /// Replace-distorted variants of a1 / b / c.
    pub a1_rep: Vec<NodeId>,
    pub b_rep: Vec<NodeId>,
    pub c_rep: Vec<NodeId>,
    /// Remove-distorted a1.
    pub a1_rem: Vec<NodeId>,
    /// One-hop neighborhood of a1 (disjoint from a1).
    pub hood_a1: Vec<NodeId>,
    pub u12: Vec<NodeId>,
    pub u23: Vec<NodeId>,
    pub u31: Vec<NodeId>,
    /// a1 ∪ hood_a1.
    pub u1h: Vec<NodeId>,
    /// The λ_clq largest cliques of a1, size-descending (λ_clq defaults to 2,
    /// in which case this is exactly [b, c]).
    pub top_cliques_a1: Vec<Vec<NodeId>>,
}

/// Community indices usable as `a1`: connected, at least 4 nodes, at least
/// two internal cliques, and enough boundary neighbors that the replace
/// distortion of the community and of both top cliques can succeed.
pub fn eligible_a1(
    g: &Graph,
    idx: &CliqueIndex,
    comms: &[Community],
    ids: &[usize],
    m_pct: u32,
) -> Vec<usize> {
    let swap_count = |len: usize| (m_pct as usize * len).div_ceil(100);
    let replaceable = |sub: &[crate::graph::NodeId]| {
        g.one_hop_neighbors(sub).len() >= swap_count(sub.len())
    };
    ids.iter()
        .copied()
        .filter(|&i| {
            let m = &comms[i].members;
            if m.len() < 4 || !g.induced_connected(m) {
                return false;
            }
            let tops = idx.top_cliques(m, 2);
            tops.len() == 2 && replaceable(m) && tops.iter().all(|t| replaceable(t))
        })
        .collect()
}

/// Community indices whose induced subgraph is connected (`a2`/`a3` pool).
pub fn connected_pool(g: &Graph, comms: &[Community], ids: &[usize]) -> Vec<usize> {
    ids.iter()
        .copied()
        .filter(|&i| g.induced_connected(&comms[i].members))
        .collect()
}

const RETRY_CAP: usize = 50;

/// Draw one batch. `a1_choice` pins `a1` to `pool[a1_choice]` (the trainer
/// cycles it through every eligible community per epoch); `None` samples it.
/// Distortion skip flags trigger a resample, up to a retry cap.
#[allow(clippy::too_many_arguments)]
pub fn sample_batch<R: Rng>(
    g: &Graph,
    idx: &CliqueIndex,
    comms: &[Community],
    pool: &[usize],
    others: &[usize],
    a1_choice: Option<usize>,
    m_pct: u32,
    lambda_clq: usize,
    rng: &mut R,
) -> Result<SampleBatch> {
    if pool.is_empty() || others.len() < 3 {
        return Err(Error::Data(
            "need at least 3 connected training communities (one with 2+ cliques)".into(),
        ));
    }
    for _ in 0..RETRY_CAP {
        let a1_id = match a1_choice {
            Some(i) => pool[i % pool.len()],
            None => pool[rng.gen_range(0..pool.len())],
        };
        let mut rest: Vec<usize> = others.iter().copied().filter(|&i| i != a1_id).collect();
        if rest.len() < 2 {
            break;
        }
        let i2 = rng.gen_range(0..rest.len());
        let a2_id = rest.swap_remove(i2);
        let i3 = rng.gen_range(0..rest.len());
        let a3_id = rest.swap_remove(i3);

        let a1 = comms[a1_id].members.clone();
        let a2 = comms[a2_id].members.clone();
        let a3 = comms[a3_id].members.clone();
        let tops = idx.top_cliques(&a1, lambda_clq.max(2));
        if tops.len() < 2 {
            continue;
        }
        let b = tops[0].clone();
        let c = tops[1].clone();
        let a1_rep = distort_replace(g, &a1, m_pct, rng);
        let b_rep = distort_replace(g, &b, m_pct, rng);
        let c_rep = distort_replace(g, &c, m_pct, rng);
        let a1_rem = distort_remove(g, &a1, m_pct, rng);
        if a1_rep.skipped || b_rep.skipped || c_rep.skipped || a1_rem.skipped {
            continue;
        }
        let hood_a1 = g.one_hop_neighbors(&a1);
        return Ok(SampleBatch {
            u12: union_sorted(&a1, &a2),
            u23: union_sorted(&a2, &a3),
            u31: union_sorted(&a3, &a1),
            u1h: union_sorted(&a1, &hood_a1),
            top_cliques_a1: tops.into_iter().take(lambda_clq.max(1)).collect(),
            a1,
            a2,
            a3,
            b,
            c,
            a1_rep: a1_rep.members,
            b_rep: b_rep.members,
            c_rep: c_rep.members,
            a1_rem: a1_rem.members,
            hood_a1,
        });
    }
    Err(Error::Data(
        "batch sampling retry cap exceeded; check dataset quality (clique-poor or boundary-free training communities)"
            .into(),
    ))
}

/// Tape embeddings for every batch member.
pub struct BatchEmbeds {
    pub a1: SubEmbed,
    pub a2: SubEmbed,
    pub a3: SubEmbed,
    pub b: SubEmbed,
    pub c: SubEmbed,
    pub a1_rep: SubEmbed,
    pub b_rep: SubEmbed,
    pub c_rep: SubEmbed,
    pub a1_rem: SubEmbed,
    pub u12: SubEmbed,
    pub u23: SubEmbed,
    pub u31: SubEmbed,
    pub u1h: SubEmbed,
    pub tops: Vec<SubEmbed>,
}

pub fn encode_batch(
    tape: &mut Tape,
    g: &Graph,
    batch: &SampleBatch,
    cfg: &EncoderCfg,
) -> Result<BatchEmbeds> {
    let enc = |sub: &[NodeId], tape: &mut Tape| encode_subgraph(tape, g, sub, cfg);
    let a1 = enc(&batch.a1, tape)?;
    let a2 = enc(&batch.a2, tape)?;
    let a3 = enc(&batch.a3, tape)?;
    let b = enc(&batch.b, tape)?;
    let c = enc(&batch.c, tape)?;
    let a1_rep = enc(&batch.a1_rep, tape)?;
    let b_rep = enc(&batch.b_rep, tape)?;
    let c_rep = enc(&batch.c_rep, tape)?;
    let a1_rem = enc(&batch.a1_rem, tape)?;
    let u12 = enc(&batch.u12, tape)?;
    let u23 = enc(&batch.u23, tape)?;
    let u31 = enc(&batch.u31, tape)?;
    let u1h = enc(&batch.u1h, tape)?;
    // λ defaults to 2 where the top cliques are exactly b and c; reuse those
    // embeddings instead of re-encoding.
    let tops = if batch.top_cliques_a1.len() == 2
        && batch.top_cliques_a1[0] == batch.b
        && batch.top_cliques_a1[1] == batch.c
    {
        vec![b, c]
    } else {
        let mut tops = Vec::with_capacity(batch.top_cliques_a1.len());
        for t in &batch.top_cliques_a1 {
            tops.push(enc(t, tape)?);
        }
        tops
    };
    Ok(BatchEmbeds {
        a1,
        a2,
        a3,
        b,
        c,
        a1_rep,
        b_rep,
        c_rep,
        a1_rem,
        u12,
        u23,
        u31,
        u1h,
        tops,
    })
}

/// Hinge `max(0, ‖i‖ − ‖j‖)`.
fn pos_hinge(tape: &mut Tape, i: SubEmbed, j: SubEmbed) -> Result<VarId> {
    let d = tape.sub(i.energy, j.energy)?;
    tape.hinge(d)
}

/// Hinge `max(0, α − (‖i‖ − ‖j‖))`.
fn neg_hinge(tape: &mut Tape, i: SubEmbed, j: SubEmbed, alpha: f64) -> Result<VarId> {
    let d = tape.sub(i.energy, j.energy)?;
    let m = tape.affine(d, -1.0, alpha)?;
    tape.hinge(m)
}

/// Size + defect energy ordering loss.
///
/// Positive size pairs (b,a1), (c,a1), (ȧ1,a1) push parts below wholes;
/// negative pairs (a1+a2,a1), (a2+a3,a2), (a3+a1,a3) keep merged unions at
/// least `α` above their parts; defect pairs (a1,ā1), (b,b̄), (c,c̄) push
/// distorted variants above the originals.
pub fn loss_energy(tape: &mut Tape, e: &BatchEmbeds, alpha: f64) -> Result<VarId> {
    let terms = vec![
        pos_hinge(tape, e.b, e.a1)?,
        pos_hinge(tape, e.c, e.a1)?,
        pos_hinge(tape, e.a1_rem, e.a1)?,
        neg_hinge(tape, e.u12, e.a1, alpha)?,
        neg_hinge(tape, e.u23, e.a2, alpha)?,
        neg_hinge(tape, e.u31, e.a3, alpha)?,
        pos_hinge(tape, e.a1, e.a1_rep)?,
        pos_hinge(tape, e.b, e.b_rep)?,
        pos_hinge(tape, e.c, e.c_rep)?,
    ];
    tape.add_n(terms)
}

/// Distance between the community embedding and the Möbius fold of its top
/// clique embeddings (size-descending fold order, fixed for determinism).
pub fn loss_consistency(tape: &mut Tape, e: &BatchEmbeds) -> Result<VarId> {
    assert!(!e.tops.is_empty(), "consistency loss needs ≥1 clique");
    let mut fold = e.tops[0].h;
    for t in &e.tops[1..] {
        let sum = tape.mobius_add(fold, t.h)?;
        fold = tape.clamp_ball(sum)?;
    }
    tape.hyp_dist(e.a1.h, fold)
}

/// Sum of interface energies of every node in `hood` against `sub`.
fn interface_sum(
    tape: &mut Tape,
    g: &Graph,
    idx: &CliqueIndex,
    hood: &[NodeId],
    sub: &[NodeId],
) -> Result<VarId> {
    if hood.is_empty() {
        return tape.scalar(0.0);
    }
    let mis = idx.mis_num(sub);
    let mut terms = Vec::with_capacity(hood.len());
    for &v in hood {
        terms.push(interface_energy(tape, g, v, sub, mis)?);
    }
    tape.add_n(terms)
}

/// Interface-barrier loss. Positive pairs (a1,b), (a1,c) require the clique
/// energy plus its boundary interface budget to reach the community energy;
/// the negative pair (a1, a1+ă1) requires the overgrown union to stay out of
/// reach of a1's budget.
pub fn loss_interface(
    tape: &mut Tape,
    g: &Graph,
    idx: &CliqueIndex,
    e: &BatchEmbeds,
    batch: &SampleBatch,
) -> Result<VarId> {
    let mut terms = Vec::with_capacity(3);
    for (j_emb, j_sub) in [(e.b, &batch.b), (e.c, &batch.c)] {
        let hood = g.one_hop_neighbors(j_sub);
        let intf = interface_sum(tape, g, idx, &hood, j_sub)?;
        let diff = tape.sub(e.a1.energy, j_emb.energy)?;
        let margin = tape.sub(diff, intf)?;
        terms.push(tape.hinge(margin)?);
    }
    let intf = interface_sum(tape, g, idx, &batch.hood_a1, &batch.a1)?;
    let diff = tape.sub(e.a1.energy, e.u1h.energy)?;
    let margin = tape.add_n(vec![diff, intf])?;
    terms.push(tape.hinge(margin)?);
    tape.add_n(terms)
}

/// Growth-status classification loss: binary cross-entropy sums over
/// undergrown {b, c, ȧ1}, equilibrium {a1, a2, a3} and overgrown
/// {a1+ă1, a1+a2, a2+a3, a3+a1}, totalled with a 1/3 factor.
pub fn loss_integrity(tape: &mut Tape, e: &BatchEmbeds) -> Result<VarId> {
    let sets: [(&[SubEmbed], usize); 3] = [
        (&[e.b, e.c, e.a1_rem], 0),
        (&[e.a1, e.a2, e.a3], 1),
        (&[e.u1h, e.u12, e.u23, e.u31], 2),
    ];
    let mut terms = Vec::new();
    for (members, class) in sets {
        for m in members {
            let y = integrity_score(tape, m.h)?;
            terms.push(tape.bce_one_hot(y, class)?);
        }
    }
    let sum = tape.add_n(terms)?;
    tape.affine(sum, 1.0 / 3.0, 0.0)
}

/// Per-batch loss values (pre-weighting) for logging and auto-balancing.
#[derive(Debug, Clone, Copy, Default)]
pub struct LossValues {
    pub energy: f64,
    pub consistency: f64,
    pub interface: f64,
}

/// Weighted total `γᴱ·lossᴱ + γᶜ·lossᶜ + γᴵ·lossᴵ` (the integrity loss is
/// trained in its own phase). Returns the root node and the raw components.
pub fn total_loss(
    tape: &mut Tape,
    g: &Graph,
    idx: &CliqueIndex,
    batch: &SampleBatch,
    weights: &LossWeights,
    cfg: &EncoderCfg,
) -> Result<(VarId, LossValues)> {
    let e = encode_batch(tape, g, batch, cfg)?;
    let le = loss_energy(tape, &e, weights.alpha)?;
    let lc = loss_consistency(tape, &e)?;
    let li = loss_interface(tape, g, idx, &e, batch)?;
    let values = LossValues {
        energy: tape.value(le).item(),
        consistency: tape.value(lc).item(),
        interface: tape.value(li).item(),
    };
    let we = tape.affine(le, weights.gamma_e, 0.0)?;
    let wc = tape.affine(lc, weights.gamma_c, 0.0)?;
    let wi = tape.affine(li, weights.gamma_i, 0.0)?;
    let total = tape.add_n(vec![we, wc, wi])?;
    Ok((total, values))
}

/// Integrity loss over a fresh batch (used by the second training phase).
pub fn integrity_loss_for_batch(
    tape: &mut Tape,
    g: &Graph,
    batch: &SampleBatch,
    cfg: &EncoderCfg,
) -> Result<VarId> {
    let e = encode_batch(tape, g, batch, cfg)?;
    loss_integrity(tape, &e)
}

/// Balance γ so each term matches the energy loss magnitude on a probe batch
/// (terms near zero keep weight 1).
pub fn auto_balance(values: &LossValues) -> (f64, f64, f64) {
    let target = values.energy;
    if target < 1e-9 {
        return (1.0, 1.0, 1.0);
    }
    let scale = |v: f64| if v < 1e-9 { 1.0 } else { target / v };
    (1.0, scale(values.consistency), scale(values.interface))
}

/// Ordering / classification quality of a trained encoder on held-out
/// communities.
pub struct OrderingReport {
    pub pos_s_pairs: usize,
    pub pos_s_ordered: usize,
    pub status_total: usize,
    pub status_correct: usize,
    /// confusion[true][predicted]
    pub confusion: [[usize; 3]; 3],
}

impl OrderingReport {
    pub fn pos_s_rate(&self) -> f64 {
        if self.pos_s_pairs == 0 {
            return 0.0;
        }
        self.pos_s_ordered as f64 / self.pos_s_pairs as f64
    }

    pub fn status_accuracy(&self) -> f64 {
        if self.status_total == 0 {
            return 0.0;
        }
        self.status_correct as f64 / self.status_total as f64
    }
}

/// Evaluate learned orderings on fresh batches drawn from `eval_ids`
/// communities: positive-pair energy ordering and growth-status argmax
/// accuracy.
#[allow(clippy::too_many_arguments)]
pub fn ordering_report<R: Rng>(
    params: &ModelParams,
    g: &Graph,
    idx: &CliqueIndex,
    comms: &[Community],
    eval_ids: &[usize],
    m_pct: u32,
    cfg: &EncoderCfg,
    rng: &mut R,
) -> Result<OrderingReport> {
    let pool = eligible_a1(g, idx, comms, eval_ids, m_pct);
    let others = connected_pool(g, comms, eval_ids);
    let mut report = OrderingReport {
        pos_s_pairs: 0,
        pos_s_ordered: 0,
        status_total: 0,
        status_correct: 0,
        confusion: [[0; 3]; 3],
    };
    for choice in 0..pool.len() {
        let batch = match sample_batch(g, idx, comms, &pool, &others, Some(choice), m_pct, 2, rng)
        {
            Ok(b) => b,
            Err(_) => continue,
        };
        let mut tape = Tape::new(params, cfg.curvature);
        let e = encode_batch(&mut tape, g, &batch, cfg)?;
        let energy = |s: SubEmbed, tape: &Tape| tape.value(s.energy).item();
        for (i, j) in [(e.b, e.a1), (e.c, e.a1), (e.a1_rem, e.a1)] {
            report.pos_s_pairs += 1;
            if energy(i, &tape) <= energy(j, &tape) {
                report.pos_s_ordered += 1;
            }
        }
        let sets: [(&[SubEmbed], usize); 3] = [
            (&[e.b, e.c, e.a1_rem], 0),
            (&[e.a1, e.a2, e.a3], 1),
            (&[e.u1h, e.u12, e.u23, e.u31], 2),
        ];
        for (members, class) in sets {
            for m in members {
                let y = integrity_score(&mut tape, m.h)?;
                let v = tape.value(y);
                let argmax = (0..3)
                    .max_by(|&a, &b| v.data[a].partial_cmp(&v.data[b]).unwrap())
                    .unwrap();
                report.status_total += 1;
                report.confusion[class][argmax] += 1;
                if argmax == class {
                    report.status_correct += 1;
                }
            }
        }
    }
    Ok(report)
}
