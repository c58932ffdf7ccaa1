//! Community-core proposal: the preliminary core filter (exact betweenness on
//! training-community subgraphs feeding a logistic node classifier), the
//! two-phase encoder training loop, and nearest-clique candidate selection.

use crate::cliques::CliqueIndex;
use crate::encoder::{core_score, embed_values, EncoderCfg};
use crate::error::{Error, Result};
use crate::graph::{Community, Graph, NodeId};
use crate::hyperbolic::hyp_distance_raw;
use crate::losses::{
    auto_balance, connected_pool, eligible_a1, integrity_loss_for_batch, sample_batch, total_loss,
    LossWeights,
};
use crate::model::{Adam, ModelParams, ParamId};
use crate::tape::Tape;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

/// Work accounting for betweenness runs; lets tests prove the computation
/// never leaves the community subgraph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BetweennessStats {
    pub nodes_visited: usize,
    pub adjacency_scans: usize,
}

/// Exact betweenness centrality (Brandes) on the induced subgraph of
/// `members` only, unnormalized undirected pair counts. Scores align with
/// `members` order.
pub fn community_betweenness(g: &Graph, members: &[NodeId]) -> (Vec<f64>, BetweennessStats) {
    let n = members.len();
    let mut stats = BetweennessStats::default();
    // Local adjacency: indices into `members`.
    let adj: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|u| members.binary_search(u).ok())
                .collect()
        })
        .collect();
    let mut bc = vec![0.0f64; n];
    for s in 0..n {
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stats.nodes_visited += 1;
            stack.push(v);
            for &w in &adj[v] {
                stats.adjacency_scans += 1;
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    // Each unordered pair was counted from both endpoints.
    for v in &mut bc {
        *v /= 2.0;
    }
    (bc, stats)
}

/// Label the highest-betweenness node of each training community as its core
/// (ties to the smallest id) and fit the logistic core classifier with Adam.
pub fn train_core_filter(
    g: &Graph,
    comms: &[Community],
    train_ids: &[usize],
    params: &mut ModelParams,
    steps: usize,
    lr: f64,
) -> Result<()> {
    if train_ids.is_empty() {
        return Err(Error::Data("core filter needs ≥1 training community".into()));
    }
    let mut samples: Vec<(NodeId, f64)> = Vec::new();
    for &ci in train_ids {
        let members = &comms[ci].members;
        let (bc, _) = community_betweenness(g, members);
        let mut best = 0usize;
        for i in 1..members.len() {
            if bc[i] > bc[best] {
                best = i;
            }
        }
        for (i, &v) in members.iter().enumerate() {
            samples.push((v, if i == best { 1.0 } else { 0.0 }));
        }
    }
    let mut adam = Adam::new(lr, params);
    for _ in 0..steps {
        let mut tape = Tape::new(params, 1.0);
        let mut terms = Vec::with_capacity(samples.len());
        for &(v, y) in &samples {
            let p = core_score(&mut tape, g, v)?;
            terms.push(tape.bce_binary(p, y)?);
        }
        let sum = tape.add_n(terms)?;
        let root = tape.affine(sum, 1.0 / samples.len() as f64, 0.0)?;
        let (grads, _) = tape.backward(root)?;
        let mut next = params.clone();
        adam.step_filtered(&mut next, &grads, |id| {
            matches!(id, ParamId::CoreW | ParamId::CoreB)
        });
        *params = next;
    }
    Ok(())
}

/// Scores for all nodes under the core classifier.
pub fn core_scores(params: &ModelParams, g: &Graph) -> Result<Vec<f64>> {
    (0..g.n() as NodeId)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&v| {
            let mut tape = Tape::new(params, 1.0);
            let s = core_score(&mut tape, g, v)?;
            Ok(tape.value(s).item())
        })
        .collect()
}

/// The top-`m` nodes by classifier score (ties by smaller id) together with
/// their ≤`hops`-hop neighborhoods, sorted.
pub fn select_seed_nodes(
    params: &ModelParams,
    g: &Graph,
    m: usize,
    hops: usize,
) -> Result<Vec<NodeId>> {
    let scores = core_scores(params, g)?;
    let mut order: Vec<NodeId> = (0..g.n() as NodeId).collect();
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .partial_cmp(&scores[a as usize])
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(m);
    let mut selected: Vec<bool> = vec![false; g.n()];
    let mut frontier: Vec<NodeId> = Vec::new();
    for &v in &order {
        selected[v as usize] = true;
        frontier.push(v);
    }
    for _ in 0..hops {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in g.neighbors(v) {
                if !selected[u as usize] {
                    selected[u as usize] = true;
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    Ok((0..g.n() as NodeId)
        .filter(|&v| selected[v as usize])
        .collect())
}

/// Training knobs for the proposer.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub dim: usize,
    pub gcn_layers: usize,
    pub proj_init_gain: f64,
    pub epochs: usize,
    pub integrity_epochs: usize,
    pub lr: f64,
    pub m_pct: u32,
    pub lambda_clq: usize,
    pub alpha: f64,
    /// None = balance γ on the first batch and freeze.
    pub gammas: Option<(f64, f64, f64)>,
    pub encoder: EncoderCfg,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            dim: 64,
            gcn_layers: crate::model::GCN_LAYERS,
            proj_init_gain: 2e-2,
            epochs: 10,
            integrity_epochs: 10,
            lr: 1e-3,
            m_pct: 25,
            lambda_clq: 2,
            alpha: 0.1,
            gammas: None,
            encoder: EncoderCfg::default(),
            seed: 0,
        }
    }
}

/// Per-epoch mean losses.
#[derive(Debug, Clone, Copy, Default)]
pub struct EpochStats {
    pub total: f64,
    pub energy: f64,
    pub consistency: f64,
    pub interface: f64,
}

#[derive(Debug, Clone, Default)]
pub struct TrainReport {
    pub gamma: (f64, f64, f64),
    pub epochs: Vec<EpochStats>,
    pub integrity_epochs: Vec<f64>,
    /// Communities excluded from sampling (disconnected or clique-poor).
    pub skipped_communities: Vec<usize>,
}

impl TrainReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("phase,epoch,total,energy,consistency,interface\n");
        for (i, e) in self.epochs.iter().enumerate() {
            writeln!(
                out,
                "encoder,{},{},{},{},{}",
                i + 1,
                e.total,
                e.energy,
                e.consistency,
                e.interface
            )
            .unwrap();
        }
        for (i, l) in self.integrity_epochs.iter().enumerate() {
            writeln!(out, "integrity,{},{},,,", i + 1, l).unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Two-phase training: minimize the weighted energy/consistency/interface
/// total over the encoder, then freeze it and fit the integrity heads alone.
/// One epoch cycles `a1` through every eligible training community.
pub fn train_nucleus_proposer(
    g: &Graph,
    idx: &CliqueIndex,
    comms: &[Community],
    train_ids: &[usize],
    opts: &TrainOptions,
) -> Result<(ModelParams, TrainReport)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut params =
        ModelParams::init_with_layers(opts.dim, opts.gcn_layers, opts.proj_init_gain, &mut rng);
    let mut report = TrainReport::default();

    let pool = eligible_a1(g, idx, comms, train_ids, opts.m_pct);
    let others = connected_pool(g, comms, train_ids);
    report.skipped_communities = train_ids
        .iter()
        .copied()
        .filter(|i| !others.contains(i))
        .collect();
    if opts.epochs == 0 && opts.integrity_epochs == 0 {
        return Ok((params, report));
    }
    if pool.is_empty() || others.len() < 3 {
        return Err(Error::Data(
            "training needs ≥3 connected communities with at least one holding 2+ cliques".into(),
        ));
    }

    // Resolve γ once, on a probe batch at the initial parameters.
    let weights = match opts.gammas {
        Some((ge, gc, gi)) => LossWeights {
            gamma_e: ge,
            gamma_c: gc,
            gamma_i: gi,
            alpha: opts.alpha,
        },
        None => {
            let mut probe_rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e3779b97f4a7c15);
            let batch = sample_batch(
                g,
                idx,
                comms,
                &pool,
                &others,
                Some(0),
                opts.m_pct,
                opts.lambda_clq,
                &mut probe_rng,
            )?;
            let mut tape = Tape::new(&params, opts.encoder.curvature);
            let (_, vals) = total_loss(
                &mut tape,
                g,
                idx,
                &batch,
                &LossWeights {
                    gamma_e: 1.0,
                    gamma_c: 1.0,
                    gamma_i: 1.0,
                    alpha: opts.alpha,
                },
                &opts.encoder,
            )?;
            let (ge, gc, gi) = auto_balance(&vals);
            LossWeights {
                gamma_e: ge,
                gamma_c: gc,
                gamma_i: gi,
                alpha: opts.alpha,
            }
        }
    };
    report.gamma = (weights.gamma_e, weights.gamma_c, weights.gamma_i);

    let mut adam = Adam::new(opts.lr, &params);
    for _epoch in 0..opts.epochs {
        let mut sums = EpochStats::default();
        for choice in 0..pool.len() {
            let batch = sample_batch(
                g,
                idx,
                comms,
                &pool,
                &others,
                Some(choice),
                opts.m_pct,
                opts.lambda_clq,
                &mut rng,
            )?;
            let (total, vals, grads) = {
                let mut tape = Tape::new(&params, opts.encoder.curvature);
                let (root, vals) = total_loss(&mut tape, g, idx, &batch, &weights, &opts.encoder)?;
                let total = tape.value(root).item();
                if !total.is_finite() {
                    return Err(Error::Numeric(format!("non-finite training loss {total}")));
                }
                let (grads, _) = tape.backward(root)?;
                (total, vals, grads)
            };
            adam.step(&mut params, &grads);
            sums.total += total;
            sums.energy += vals.energy;
            sums.consistency += vals.consistency;
            sums.interface += vals.interface;
        }
        let n = pool.len() as f64;
        report.epochs.push(EpochStats {
            total: sums.total / n,
            energy: sums.energy / n,
            consistency: sums.consistency / n,
            interface: sums.interface / n,
        });
    }

    // Phase 2: integrity heads only. The encoder is frozen, so subgraph
    // embeddings are constants and can be memoized across epochs; only the
    // three linear heads run on the tape.
    let mut adam2 = Adam::new(opts.lr, &params);
    let mut embed_cache: std::collections::HashMap<Vec<crate::graph::NodeId>, Vec<f64>> =
        std::collections::HashMap::new();
    for _epoch in 0..opts.integrity_epochs {
        let mut sum = 0.0;
        for choice in 0..pool.len() {
            let batch = sample_batch(
                g,
                idx,
                comms,
                &pool,
                &others,
                Some(choice),
                opts.m_pct,
                opts.lambda_clq,
                &mut rng,
            )?;
            let sets: [(&[&Vec<crate::graph::NodeId>], usize); 3] = [
                (&[&batch.b, &batch.c, &batch.a1_rem], 0),
                (&[&batch.a1, &batch.a2, &batch.a3], 1),
                (&[&batch.u1h, &batch.u12, &batch.u23, &batch.u31], 2),
            ];
            let (value, grads) = {
                let mut tape = Tape::new(&params, opts.encoder.curvature);
                let mut terms = Vec::new();
                for (members, class) in sets {
                    for sub in members {
                        let h = match embed_cache.get(*sub) {
                            Some(h) => h.clone(),
                            None => {
                                let (h, _) =
                                    crate::encoder::embed_values(&params, g, sub, &opts.encoder)?;
                                embed_cache.insert((*sub).clone(), h.clone());
                                h
                            }
                        };
                        let hv = tape.konst(crate::tensor::Tensor::row_vector(h))?;
                        let y = crate::encoder::integrity_score(&mut tape, hv)?;
                        terms.push(tape.bce_one_hot(y, class)?);
                    }
                }
                let total = tape.add_n(terms)?;
                let root = tape.affine(total, 1.0 / 3.0, 0.0)?;
                let (grads, _) = tape.backward(root)?;
                (tape.value(root).item(), grads)
            };
            sum += value;
            adam2.step_filtered(&mut params, &grads, |id| {
                matches!(id, ParamId::IntegW(_) | ParamId::IntegB(_))
            });
        }
        report.integrity_epochs.push(sum / pool.len() as f64);
    }

    Ok((params, report))
}

/// One proposed community core.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub members: Vec<NodeId>,
    pub clique_id: usize,
    pub source_community: usize,
    pub distance: f64,
}

/// Ordered candidate list: for each training community, its
/// `⌊M/|train|⌋` embedding-nearest cliques, distances non-decreasing within
/// each community slice. Cross-community duplicates are retained.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    pub entries: Vec<Candidate>,
    pub per_community: usize,
    /// True when fewer cliques than requested were available.
    pub truncated: bool,
}

impl CandidateSet {
    pub fn dump(&self, path: &Path, g: &Graph) -> Result<()> {
        let mut out = String::new();
        for e in &self.entries {
            let members: Vec<String> = e
                .members
                .iter()
                .map(|&v| g.orig_id(v).to_string())
                .collect();
            writeln!(
                out,
                "{} {:.9} {}",
                e.source_community,
                e.distance,
                members.join(" ")
            )
            .unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Rank every indexed clique by hyperbolic distance to each training
/// community's embedding and keep the nearest `⌊m_total/|train|⌋` per
/// community (distance ties to the smaller clique id).
pub fn propose_candidates(
    params: &ModelParams,
    g: &Graph,
    idx: &CliqueIndex,
    comms: &[Community],
    train_ids: &[usize],
    m_total: usize,
    cfg: &EncoderCfg,
) -> Result<CandidateSet> {
    if idx.is_empty() {
        return Err(Error::Data("no cliques to propose candidates from".into()));
    }
    if train_ids.is_empty() {
        return Err(Error::Data("no training communities".into()));
    }
    let per = m_total / train_ids.len();
    let clique_embeds: Vec<Vec<f64>> = idx
        .cliques()
        .par_iter()
        .map(|c| embed_values(params, g, c, cfg).map(|(h, _)| h))
        .collect::<Result<_>>()?;
    let mut set = CandidateSet {
        per_community: per,
        truncated: per > idx.len(),
        ..CandidateSet::default()
    };
    for &ci in train_ids {
        let (hc, _) = embed_values(params, g, &comms[ci].members, cfg)?;
        let mut ranked: Vec<(f64, usize)> = clique_embeds
            .par_iter()
            .enumerate()
            .map(|(qi, hq)| Ok((hyp_distance_raw(&hc, hq, cfg.curvature)?, qi)))
            .collect::<Result<_>>()?;
        ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(d, qi) in ranked.iter().take(per) {
            set.entries.push(Candidate {
                members: idx.clique(qi).to_vec(),
                clique_id: qi,
                source_community: ci,
                distance: d,
            });
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::{enumerate_maximal_cliques, OpCounter};

    fn enumerate(g: &Graph) -> CliqueIndex {
        enumerate_maximal_cliques(g, None, 1_000_000, &OpCounter::default()).unwrap()
    }

    /// Brute-force betweenness: enumerate all shortest paths pair by pair.
    fn brute_betweenness(g: &Graph, members: &[NodeId]) -> Vec<f64> {
        let n = members.len();
        let adj: Vec<Vec<usize>> = members
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|u| members.binary_search(u).ok())
                    .collect()
            })
            .collect();
        // all_paths(s,t): enumerate shortest paths via BFS layers + DFS
        let mut bc = vec![0.0f64; n];
        for s in 0..n {
            for t in 0..n {
                if s >= t {
                    continue;
                }
                let mut dist = vec![usize::MAX; n];
                dist[s] = 0;
                let mut q = std::collections::VecDeque::from([s]);
                while let Some(v) = q.pop_front() {
                    for &w in &adj[v] {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[v] + 1;
                            q.push_back(w);
                        }
                    }
                }
                if dist[t] == usize::MAX {
                    continue;
                }
                // count shortest paths through each node via DFS from t back
                fn walk(
                    v: usize,
                    s: usize,
                    adj: &[Vec<usize>],
                    dist: &[usize],
                    path: &mut Vec<usize>,
                    acc: &mut Vec<Vec<usize>>,
                ) {
                    if v == s {
                        acc.push(path.clone());
                        return;
                    }
                    for &w in &adj[v] {
                        if dist[w] + 1 == dist[v] {
                            path.push(w);
                            walk(w, s, adj, dist, path, acc);
                            path.pop();
                        }
                    }
                }
                let mut acc = Vec::new();
                walk(t, s, &adj, &dist, &mut vec![], &mut acc);
                let total = acc.len() as f64;
                for path in acc {
                    for &v in &path {
                        if v != s && v != t {
                            bc[v] += 1.0 / total;
                        }
                    }
                }
            }
        }
        bc
    }

    #[test]
    fn betweenness_five_path_middle_is_four() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let members: Vec<NodeId> = (0..5).collect();
        let (bc, _) = community_betweenness(&g, &members);
        assert_eq!(bc[2], 4.0);
        let brute = brute_betweenness(&g, &members);
        for (a, b) in bc.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-9, "{bc:?} vs {brute:?}");
        }
    }

    #[test]
    fn betweenness_matches_brute_force_on_random_subgraphs() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let n = 8;
            let mut edges = Vec::new();
            for u in 0..n as NodeId {
                for v in u + 1..n as NodeId {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let members: Vec<NodeId> = (0..n as NodeId).collect();
            let (bc, _) = community_betweenness(&g, &members);
            let brute = brute_betweenness(&g, &members);
            for (a, b) in bc.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn betweenness_footprint_ignores_outside_graph() {
        // The same 6-node community embedded in graphs of very different
        // sizes must cost exactly the same work.
        let comm_edges: Vec<(NodeId, NodeId)> =
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)];
        let small = Graph::from_edges(6, &comm_edges).unwrap();
        let mut big_edges = comm_edges.clone();
        for i in 6..200u32 {
            big_edges.push((i, (i + 1) % 200));
            big_edges.push((0, i)); // heavy outside attachment to community nodes
        }
        let big = Graph::from_edges(200, &big_edges).unwrap();
        let members: Vec<NodeId> = (0..6).collect();
        let (bc_small, stats_small) = community_betweenness(&small, &members);
        let (bc_big, stats_big) = community_betweenness(&big, &members);
        assert_eq!(bc_small, bc_big);
        assert_eq!(stats_small, stats_big);
    }

    #[test]
    fn core_filter_labels_star_center() {
        // star community: center has maximal betweenness
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let members: Vec<NodeId> = (0..6).collect();
        let (bc, _) = community_betweenness(&g, &members);
        let best = (0..6).max_by(|&a, &b| bc[a].partial_cmp(&bc[b]).unwrap()).unwrap();
        assert_eq!(best, 0);
        let comms = vec![Community::new(0, members)];
        let mut params = ModelParams::zeros(4);
        train_core_filter(&g, &comms, &[0], &mut params, 50, 0.05).unwrap();
        // the trained classifier scores the hub highest
        let scores = core_scores(&params, &g).unwrap();
        let top = (0..6).max_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap()).unwrap();
        assert_eq!(top, 0);
    }

    #[test]
    fn core_filter_clique_tie_breaks_to_smallest_id() {
        // all-zero betweenness in a clique: the argmax scan keeps index 0
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let members: Vec<NodeId> = (0..4).collect();
        let (bc, _) = community_betweenness(&g, &members);
        assert!(bc.iter().all(|&v| v == 0.0));
        let mut best = 0usize;
        for i in 1..members.len() {
            if bc[i] > bc[best] {
                best = i;
            }
        }
        assert_eq!(best, 0);
    }

    #[test]
    fn seed_selection_edges() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let params = ModelParams::zeros(4);
        // m = n → everything
        let all = select_seed_nodes(&params, &g, 6, 0).unwrap();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
        // hops = 0 → exactly the top-m (zero params tie → smallest ids)
        let top2 = select_seed_nodes(&params, &g, 2, 0).unwrap();
        assert_eq!(top2, vec![0, 1]);
        // hops = 1 expands by neighbors
        let expanded = select_seed_nodes(&params, &g, 1, 1).unwrap();
        assert_eq!(expanded, vec![0, 1]);
    }

    #[test]
    fn top_m_matches_sort_oracle_on_random_scores() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // random graph with distinct degree patterns → varied scores
        let n = 30;
        let mut edges = Vec::new();
        for u in 0..n as NodeId {
            for v in u + 1..n as NodeId {
                if rng.gen_bool(0.15) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let params = ModelParams::init(4, 1.0, &mut rng);
        let scores = core_scores(&params, &g).unwrap();
        let got = select_seed_nodes(&params, &g, 5, 0).unwrap();
        let mut oracle: Vec<NodeId> = (0..n as NodeId).collect();
        oracle.sort_by(|&a, &b| {
            scores[b as usize]
                .partial_cmp(&scores[a as usize])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut expect = oracle[..5].to_vec();
        expect.sort_unstable();
        assert_eq!(got, expect);
    }

    #[test]
    fn zero_epoch_training_returns_initialized_params() {
        let block: &[(u32, u32)] = &[
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
        ];
        let mut edges = Vec::new();
        for shift in [0u32, 6, 12] {
            edges.extend(block.iter().map(|&(a, b)| (a + shift, b + shift)));
        }
        edges.push((5, 6));
        edges.push((11, 12));
        let g = Graph::from_edges(18, &edges).unwrap();
        let idx = enumerate(&g);
        let comms = vec![
            Community::new(0, (0..6).collect()),
            Community::new(1, (6..12).collect()),
            Community::new(2, (12..18).collect()),
        ];
        let opts = TrainOptions {
            dim: 8,
            epochs: 0,
            integrity_epochs: 0,
            seed: 7,
            ..TrainOptions::default()
        };
        let (params, report) = train_nucleus_proposer(&g, &idx, &comms, &[0, 1, 2], &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let expect = ModelParams::init(8, opts.proj_init_gain, &mut rng);
        assert_eq!(params, expect);
        assert!(report.epochs.is_empty());
    }

    #[test]
    fn candidates_respect_per_community_quota_and_order() {
        let block: &[(u32, u32)] = &[
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
        ];
        let mut edges = Vec::new();
        for shift in [0u32, 6, 12] {
            edges.extend(block.iter().map(|&(a, b)| (a + shift, b + shift)));
        }
        edges.push((5, 6));
        edges.push((11, 12));
        let g = Graph::from_edges(18, &edges).unwrap();
        let idx = enumerate(&g);
        let comms = vec![
            Community::new(0, (0..6).collect()),
            Community::new(1, (6..12).collect()),
            Community::new(2, (12..18).collect()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = ModelParams::init(8, 1e-2, &mut rng);
        let cfg = EncoderCfg::default();
        // M = 2·|train| → two nearest cliques per community
        let set = propose_candidates(&params, &g, &idx, &comms, &[0, 1], 4, &cfg).unwrap();
        assert_eq!(set.per_community, 2);
        assert_eq!(set.entries.len(), 4);
        for pair in set.entries.chunks(2) {
            assert!(pair[0].distance <= pair[1].distance);
            assert_eq!(pair[0].source_community, pair[1].source_community);
        }
        // determinism under the same params
        let set2 = propose_candidates(&params, &g, &idx, &comms, &[0, 1], 4, &cfg).unwrap();
        let key =
            |s: &CandidateSet| s.entries.iter().map(|e| (e.clique_id, e.source_community)).collect::<Vec<_>>();
        assert_eq!(key(&set), key(&set2));
    }

    #[test]
    fn m_equal_to_train_count_gives_one_each() {
        let g = Graph::from_edges(
            8,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (3, 5),
                (5, 6),
                (6, 7),
                (5, 7),
                (6, 3),
            ],
        )
        .unwrap();
        let idx = enumerate(&g);
        let comms = vec![
            Community::new(0, vec![0, 1, 2]),
            Community::new(1, vec![3, 4, 5]),
        ];
        let params = ModelParams::zeros(8);
        let set =
            propose_candidates(&params, &g, &idx, &comms, &[0, 1], 2, &EncoderCfg::default())
                .unwrap();
        assert_eq!(set.per_community, 1);
        assert_eq!(set.entries.len(), 2);
        // zero params: every distance is 0 → ties break to clique id 0
        assert!(set.entries.iter().all(|e| e.clique_id == 0));
        assert_eq!(set.entries[0].distance, 0.0);
    }
}
