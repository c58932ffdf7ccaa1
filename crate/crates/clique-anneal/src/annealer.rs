//! Learning-free candidate growth. Each step checks the state's growth
//! status, collects boundary nodes with their merged cliques, optionally
//! relocates the working core to a dominant boundary merge, and accepts
//! expansions whose softmax energy score beats a size-keyed temperature gate
//! while satisfying the interface-energy budget. No parameter is ever
//! modified here.

use crate::cliques::CliqueIndex;
use crate::encoder::{embed_values, integrity_values, interface_energy_value, EncoderCfg};
use crate::error::Result;
use crate::graph::{union_sorted, Graph, NodeId};
use crate::model::ModelParams;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write as _;
use std::path::Path;

/// Normal-CDF temperature gate keyed on training-community sizes.
#[derive(Debug, Clone, Copy)]
pub struct TempSchedule {
    pub mu: f64,
    pub sigma: f64,
}

impl TempSchedule {
    /// Mean and population standard deviation of the sizes, σ floored at 1.
    pub fn from_sizes(sizes: &[usize]) -> TempSchedule {
        if sizes.is_empty() {
            return TempSchedule { mu: 0.0, sigma: 1.0 };
        }
        let n = sizes.len() as f64;
        let mu = sizes.iter().sum::<usize>() as f64 / n;
        let var = sizes
            .iter()
            .map(|&s| {
                let d = s as f64 - mu;
                d * d
            })
            .sum::<f64>()
            / n;
        TempSchedule {
            mu,
            sigma: var.sqrt().max(1.0),
        }
    }

    /// Φ((size − μ)/σ): the acceptance bar rises with candidate size.
    /// Clamped into the open interval so extreme sizes stay comparable.
    pub fn p_temp(&self, size: usize) -> f64 {
        let z = (size as f64 - self.mu) / self.sigma;
        let phi = 0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2));
        phi.clamp(1e-15, 1.0 - 1e-15)
    }
}

/// Max-subtracted softmax.
pub fn softmax(values: &[f64]) -> Vec<f64> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Interface-energy feasibility of merging `c_e` (disjoint from the state)
/// through boundary node `v`:
/// `‖C_e‖ + ‖S‖ + |C_e|·Intf-E(v) ≥ ‖S ∪ C_e‖`.
pub fn interface_feasible(
    params: &ModelParams,
    g: &Graph,
    idx: &CliqueIndex,
    state: &[NodeId],
    c_e: &[NodeId],
    v: NodeId,
    cfg: &EncoderCfg,
) -> Result<bool> {
    if c_e.is_empty() {
        return Ok(true);
    }
    let (_, e_state) = embed_values(params, g, state, cfg)?;
    let (_, e_ce) = embed_values(params, g, c_e, cfg)?;
    let union = union_sorted(state, c_e);
    let (_, e_union) = embed_values(params, g, &union, cfg)?;
    let mis = idx.mis_num(state);
    let intf = interface_energy_value(params, g, v, state, mis, cfg)?;
    Ok(e_ce + e_state + c_e.len() as f64 * intf >= e_union)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceAction {
    Merge,
    Fallback,
    RejectEnergy,
    RejectInterface,
    Transition,
    Stop,
}

/// One annealing event. Merge-like events carry every quantity of the
/// feasibility inequality so traces can be re-verified offline.
#[derive(Debug, Clone, Serialize)]
pub struct TraceEvent {
    pub step: usize,
    pub action: TraceAction,
    /// Nodes involved: the merge set, or the new core for transitions.
    pub delta: Vec<NodeId>,
    pub energy_state: f64,
    pub energy_candidate: f64,
    pub energy_merge: f64,
    pub interface_budget: f64,
    pub p_score: f64,
    pub p_temp: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Append-only per-candidate record of an annealing run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AnnealTrace {
    pub candidate_id: usize,
    pub start: Vec<NodeId>,
    pub events: Vec<TraceEvent>,
    pub growth_steps: usize,
    pub transitions: usize,
    pub final_members: Vec<NodeId>,
}

/// Growth limits and encoder settings.
#[derive(Debug, Clone, Copy)]
pub struct AnnealOptions {
    pub max_steps: usize,
    pub max_transitions: usize,
    pub encoder: EncoderCfg,
}

impl Default for AnnealOptions {
    fn default() -> Self {
        AnnealOptions {
            max_steps: 20,
            max_transitions: 0,
            encoder: EncoderCfg::default(),
        }
    }
}

struct BoundaryMerge {
    v: NodeId,
    c_e: Vec<NodeId>,
    union: Vec<NodeId>,
    e_ce: f64,
    e_union: f64,
    integ_ce: [f64; 3],
}

/// Grow one candidate until it stops being undergrown, stalls, or exhausts
/// its budget. Fully deterministic: acceptance compares softmax scores to the
/// temperature gate, no coin flips.
pub fn anneal(
    params: &ModelParams,
    g: &Graph,
    idx: &CliqueIndex,
    sched: &TempSchedule,
    candidate: &[NodeId],
    opts: &AnnealOptions,
) -> Result<(Vec<NodeId>, AnnealTrace)> {
    let cfg = &opts.encoder;
    let mut state: Vec<NodeId> = candidate.to_vec();
    state.sort_unstable();
    state.dedup();
    let mut trace = AnnealTrace {
        start: state.clone(),
        ..AnnealTrace::default()
    };
    let stop = |trace: &mut AnnealTrace, step: usize, note: &str, e_state: f64| {
        trace.events.push(TraceEvent {
            step,
            action: TraceAction::Stop,
            delta: Vec::new(),
            energy_state: e_state,
            energy_candidate: 0.0,
            energy_merge: 0.0,
            interface_budget: 0.0,
            p_score: 0.0,
            p_temp: 0.0,
            note: Some(note.into()),
        });
    };

    loop {
        let step = trace.growth_steps;
        let (_, e_state) = embed_values(params, g, &state, cfg)?;
        let integ_state = integrity_values(params, g, &state, cfg)?;
        let max_integ = integ_state.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if integ_state[0] < max_integ {
            stop(&mut trace, step, "integrity", e_state);
            break;
        }
        let boundary = g.one_hop_neighbors(&state);
        if boundary.is_empty() {
            stop(&mut trace, step, "no-boundary", e_state);
            break;
        }

        // Boundary nodes indexed in no clique contribute nothing to merge;
        // they are skipped rather than treated as singleton units, so stray
        // bridge endpoints cannot seep into the state one by one.
        let merges: Vec<BoundaryMerge> = boundary
            .iter()
            .filter_map(|&v| {
                let c_e = idx.merged_clique(v, &state);
                if c_e.is_empty() {
                    return None;
                }
                let build = || -> Result<BoundaryMerge> {
                    let union = union_sorted(&state, &c_e);
                    let (_, e_ce) = embed_values(params, g, &c_e, cfg)?;
                    let (_, e_union) = embed_values(params, g, &union, cfg)?;
                    let integ_ce = integrity_values(params, g, &c_e, cfg)?;
                    Ok(BoundaryMerge {
                        v,
                        c_e,
                        union,
                        e_ce,
                        e_union,
                        integ_ce,
                    })
                };
                Some(build())
            })
            .collect::<Result<_>>()?;
        if merges.is_empty() {
            stop(&mut trace, step, "no-merges", e_state);
            break;
        }

        // Core relocation: a boundary merge whose equilibrium score strictly
        // dominates the state and every other distinct merge becomes the new
        // core. Duplicate merge sets are collapsed for the dominance test.
        if trace.transitions < opts.max_transitions {
            let mut distinct: Vec<&BoundaryMerge> = Vec::new();
            for m in &merges {
                if !distinct.iter().any(|d| d.c_e == m.c_e) {
                    distinct.push(m);
                }
            }
            let best = distinct
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.integ_ce[1].partial_cmp(&b.integ_ce[1]).unwrap())
                .map(|(i, _)| i);
            if let Some(bi) = best {
                let y2 = distinct[bi].integ_ce[1];
                let dominates_state = y2 > integ_state[1];
                let dominates_rest = distinct
                    .iter()
                    .enumerate()
                    .all(|(j, m)| j == bi || y2 > m.integ_ce[1]);
                if dominates_state && dominates_rest {
                    let new_core = distinct[bi].c_e.clone();
                    trace.events.push(TraceEvent {
                        step,
                        action: TraceAction::Transition,
                        delta: new_core.clone(),
                        energy_state: e_state,
                        energy_candidate: distinct[bi].e_union,
                        energy_merge: distinct[bi].e_ce,
                        interface_budget: 0.0,
                        p_score: y2,
                        p_temp: integ_state[1],
                        note: None,
                    });
                    trace.transitions += 1;
                    state = new_core;
                    continue;
                }
            }
        }

        // Probabilistic acceptance over energy gains, gated by feasibility.
        let gains: Vec<f64> = merges.iter().map(|m| m.e_union - e_state).collect();
        let scores = softmax(&gains);
        let mis_state = idx.mis_num(&state);
        let mut accepted: Vec<usize> = Vec::new();
        let mut feasibility: Vec<(bool, f64)> = Vec::with_capacity(merges.len());
        for (i, m) in merges.iter().enumerate() {
            let intf = interface_energy_value(params, g, m.v, &state, mis_state, cfg)?;
            let budget = m.c_e.len() as f64 * intf;
            let feasible = m.e_ce + e_state + budget >= m.e_union;
            feasibility.push((feasible, budget));
            let gate = sched.p_temp(m.union.len());
            if scores[i] > gate && feasible {
                accepted.push(i);
            } else {
                trace.events.push(TraceEvent {
                    step,
                    action: if feasible {
                        TraceAction::RejectEnergy
                    } else {
                        TraceAction::RejectInterface
                    },
                    delta: m.c_e.clone(),
                    energy_state: e_state,
                    energy_candidate: m.e_union,
                    energy_merge: m.e_ce,
                    interface_budget: budget,
                    p_score: scores[i],
                    p_temp: gate,
                    note: None,
                });
            }
        }
        let mut fallback = false;
        if accepted.is_empty() {
            // The state is still undergrown; keep the single best feasible
            // expansion alive rather than stalling on a cold gate. Merges
            // whose expanded state already classifies as overgrown stay
            // excluded, so the fallback cannot absorb a foreign region
            // across a bridge edge.
            let mut ranked: Vec<usize> = (0..merges.len())
                .filter(|&i| feasibility[i].0)
                .collect();
            ranked.sort_by(|&a, &b| {
                merges[b]
                    .e_union
                    .partial_cmp(&merges[a].e_union)
                    .unwrap()
                    .then(merges[a].v.cmp(&merges[b].v))
            });
            let mut best = None;
            for i in ranked {
                let y = integrity_values(params, g, &merges[i].union, cfg)?;
                let overgrown = y[2] >= y[0] && y[2] >= y[1];
                if !overgrown {
                    best = Some(i);
                    break;
                }
            }
            match best {
                Some(i) => {
                    accepted.push(i);
                    fallback = true;
                }
                None => {
                    stop(&mut trace, step, "no-feasible", e_state);
                    break;
                }
            }
        }

        let mut next = state.clone();
        for &i in &accepted {
            let m = &merges[i];
            next = union_sorted(&next, &m.c_e);
            trace.events.push(TraceEvent {
                step,
                action: if fallback {
                    TraceAction::Fallback
                } else {
                    TraceAction::Merge
                },
                delta: m.c_e.clone(),
                energy_state: e_state,
                energy_candidate: m.e_union,
                energy_merge: m.e_ce,
                interface_budget: feasibility[i].1,
                p_score: scores[i],
                p_temp: sched.p_temp(m.union.len()),
                note: None,
            });
        }
        debug_assert!(next.len() > state.len());
        state = next;
        trace.growth_steps += 1;
        if trace.growth_steps >= opts.max_steps {
            let (_, e) = embed_values(params, g, &state, cfg)?;
            let at = trace.growth_steps;
            stop(&mut trace, at, "budget", e);
            break;
        }
    }
    trace.final_members = state.clone();
    Ok((state, trace))
}

/// Anneal every candidate independently (worker pool, deterministic ordered
/// reduction) and deduplicate identical final member sets keeping first
/// occurrences.
pub fn detect(
    params: &ModelParams,
    g: &Graph,
    idx: &CliqueIndex,
    candidates: &[Vec<NodeId>],
    sched: &TempSchedule,
    opts: &AnnealOptions,
) -> Result<(Vec<Vec<NodeId>>, Vec<AnnealTrace>)> {
    let runs: Vec<(Vec<NodeId>, AnnealTrace)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, cand)| {
            let (members, mut trace) = anneal(params, g, idx, sched, cand, opts)?;
            trace.candidate_id = i;
            Ok((members, trace))
        })
        .collect::<Result<_>>()?;
    let mut seen: std::collections::HashSet<Vec<NodeId>> = std::collections::HashSet::new();
    let mut preds = Vec::new();
    let mut traces = Vec::with_capacity(runs.len());
    for (members, trace) in runs {
        if seen.insert(members.clone()) {
            preds.push(members);
        }
        traces.push(trace);
    }
    Ok((preds, traces))
}

/// Write traces as JSON lines.
pub fn write_traces(path: &Path, traces: &[AnnealTrace]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for t in traces {
        serde_json::to_writer(&mut file, t)
            .map_err(|e| crate::error::Error::Data(format!("trace serialization: {e}")))?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::{enumerate_maximal_cliques, OpCounter};
    use crate::model::ParamId;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn enumerate(g: &Graph) -> CliqueIndex {
        enumerate_maximal_cliques(g, None, 1_000_000, &OpCounter::default()).unwrap()
    }

    #[test]
    fn p_temp_examples() {
        let sched = TempSchedule { mu: 10.0, sigma: 2.0 };
        assert!((sched.p_temp(10) - 0.5).abs() < 1e-12);
        assert!((sched.p_temp(14) - 0.9772498680518208).abs() < 1e-9);
        let mut last = 0.0;
        for s in 1..=20 {
            let p = sched.p_temp(s);
            assert!(p > last && p < 1.0, "s={s} p={p}");
            last = p;
        }
        for s in 21..40 {
            let p = sched.p_temp(s);
            assert!(p >= last && p < 1.0, "s={s} p={p}");
            last = p;
        }
    }

    #[test]
    fn schedule_floors_degenerate_sigma() {
        let sched = TempSchedule::from_sizes(&[7, 7, 7]);
        assert_eq!(sched.mu, 7.0);
        assert_eq!(sched.sigma, 1.0);
    }

    #[test]
    fn softmax_symmetry() {
        let p = softmax(&[0.3, 0.3]);
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!((p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_merge_is_trivially_feasible() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let idx = enumerate(&g);
        let params = ModelParams::zeros(8);
        let ok = interface_feasible(
            &params,
            &g,
            &idx,
            &[0, 1],
            &[],
            2,
            &EncoderCfg::default(),
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn huge_interface_energy_saturates_feasibility() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let idx = enumerate(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut params = ModelParams::init(8, 1e-2, &mut rng);
        params.intf_b.data[0] = 50.0; // softplus ≈ 50 per node
        let ok = interface_feasible(
            &params,
            &g,
            &idx,
            &[0, 1, 2],
            &[3, 4],
            3,
            &EncoderCfg::default(),
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn feasibility_matches_scalar_recomputation() {
        let g = Graph::from_edges(
            7,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 3),
                (3, 4),
                (3, 5),
                (4, 5),
                (5, 6),
            ],
        )
        .unwrap();
        let idx = enumerate(&g);
        let cfg = EncoderCfg::default();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for case in 0..3 {
            let params = ModelParams::init(8, 1e-2, &mut rng);
            let (state, ce, v): (Vec<NodeId>, Vec<NodeId>, NodeId) = match case {
                0 => (vec![0, 1, 2], vec![3, 4, 5], 3),
                1 => (vec![3, 4, 5], vec![0, 1, 2], 2),
                _ => (vec![0, 1, 2, 3], vec![4, 5], 4),
            };
            let got = interface_feasible(&params, &g, &idx, &state, &ce, v, &cfg).unwrap();
            // independent scalar recomputation
            let e = |s: &[NodeId]| embed_values(&params, &g, s, &cfg).unwrap().1;
            let intf = interface_energy_value(&params, &g, v, &state, idx.mis_num(&state), &cfg)
                .unwrap();
            let expect = e(&ce) + e(&state) + ce.len() as f64 * intf >= e(&union_sorted(&state, &ce));
            assert_eq!(got, expect, "case {case}");
        }
    }

    /// Two overlapping 4-cliques bridged to a far triangle.
    fn two_clique_graph() -> Graph {
        Graph::from_edges(
            9,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 2),
                (1, 3),
                (2, 3),
                (2, 4),
                (2, 5),
                (3, 4),
                (3, 5),
                (4, 5),
                (5, 6),
                (6, 7),
                (6, 8),
                (7, 8),
            ],
        )
        .unwrap()
    }

    #[test]
    fn stable_candidate_returns_unchanged_in_zero_steps() {
        let g = two_clique_graph();
        let idx = enumerate(&g);
        // Head bias forces "equilibrium" to dominate every subgraph.
        let mut params = ModelParams::zeros(8);
        params.integ_b[1].data[0] = 2.0;
        let sched = TempSchedule { mu: 4.0, sigma: 1.0 };
        let (members, trace) = anneal(
            &params,
            &g,
            &idx,
            &sched,
            &[0, 1, 2, 3],
            &AnnealOptions::default(),
        )
        .unwrap();
        assert_eq!(members, vec![0, 1, 2, 3]);
        assert_eq!(trace.growth_steps, 0);
        assert_eq!(trace.events.len(), 1);
        assert_eq!(trace.events[0].action, TraceAction::Stop);
    }

    #[test]
    fn undergrown_candidate_grows_and_traces_merges() {
        let g = two_clique_graph();
        let idx = enumerate(&g);
        // Undergrown head dominant → growth proceeds until the step budget.
        let mut params = ModelParams::zeros(8);
        params.integ_b[0].data[0] = 2.0;
        let sched = TempSchedule { mu: 6.0, sigma: 2.0 };
        let opts = AnnealOptions {
            max_steps: 4,
            max_transitions: 0,
            encoder: EncoderCfg::default(),
        };
        let (members, trace) = anneal(&params, &g, &idx, &sched, &[0, 1, 2, 3], &opts).unwrap();
        assert!(members.len() > 4);
        assert!(trace.growth_steps >= 1);
        // monotone growth within the run
        let mut size = trace.start.len();
        let mut current = trace.start.clone();
        for e in &trace.events {
            if matches!(e.action, TraceAction::Merge | TraceAction::Fallback) {
                current = union_sorted(&current, &e.delta);
                assert!(current.len() >= size);
                size = current.len();
            }
        }
        assert_eq!(current, members);
        // every accepted merge satisfied the feasibility inequality at
        // acceptance time
        for e in &trace.events {
            if matches!(e.action, TraceAction::Merge | TraceAction::Fallback) {
                assert!(
                    e.energy_merge + e.energy_state + e.interface_budget
                        >= e.energy_candidate - 1e-12,
                    "trace violates the interface inequality: {e:?}"
                );
            }
        }
        // termination within budget
        assert!(trace.growth_steps <= opts.max_steps);
    }

    #[test]
    fn detect_dedups_and_never_mutates_params() {
        let g = two_clique_graph();
        let idx = enumerate(&g);
        let mut params = ModelParams::zeros(8);
        params.integ_b[1].data[0] = 2.0; // everything stops immediately
        let before = params.clone();
        let sched = TempSchedule { mu: 4.0, sigma: 1.0 };
        let candidates = vec![vec![0u32, 1, 2, 3], vec![0u32, 1, 2, 3], vec![6u32, 7, 8]];
        let (preds, traces) = detect(
            &params,
            &g,
            &idx,
            &candidates,
            &sched,
            &AnnealOptions::default(),
        )
        .unwrap();
        assert_eq!(preds.len(), 2, "identical finals deduplicate");
        assert_eq!(traces.len(), 3);
        assert_eq!(params, before);
        // and param tensors were not even touched bitwise
        for id in [ParamId::ProjW, ParamId::IntegW(0)] {
            assert_eq!(params.get(id).data, before.get(id).data);
        }
        // empty candidate list → empty predictions
        let (none, _) = detect(&params, &g, &idx, &[], &sched, &AnnealOptions::default()).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn traces_serialize_as_json_lines() {
        let g = two_clique_graph();
        let idx = enumerate(&g);
        let mut params = ModelParams::zeros(8);
        params.integ_b[1].data[0] = 2.0;
        let sched = TempSchedule { mu: 4.0, sigma: 1.0 };
        let (_, trace) = anneal(
            &params,
            &g,
            &idx,
            &sched,
            &[0, 1, 2, 3],
            &AnnealOptions::default(),
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_traces(f.path(), &[trace]).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        assert_eq!(text.lines().count(), 1);
        let parsed: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(parsed["events"][0]["action"], "stop");
    }
}
