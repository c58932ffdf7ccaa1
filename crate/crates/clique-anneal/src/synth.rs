//! Desk-scale synthetic data: planted communities with guaranteed internal
//! cliques, plus the preprocessing transform used on labeled corpora
//! (percentile size cut, sampling, optional hybrid cross-links).

use crate::error::{Error, Result};
use crate::graph::{Community, Graph, NodeId};
use rand::Rng;

/// Planted-community generator parameters.
#[derive(Debug, Clone, Copy)]
pub struct SynthParams {
    pub n_comm: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub p_intra: f64,
    pub p_inter: f64,
    /// Per-community intra-density is drawn from
    /// `[p_intra − p_jitter, p_intra]`, keeping blocks heterogeneous so
    /// community embeddings spread instead of collapsing onto one anchor.
    pub p_jitter: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_comm: 100,
            size_min: 6,
            size_max: 12,
            p_intra: 0.9,
            p_inter: 0.001,
            p_jitter: 0.25,
        }
    }
}

/// Generate a graph of disjoint planted communities. Each community is an
/// Erdős–Rényi block at `p_intra` seeded with an explicit triangle (so every
/// community holds a clique), made internally connected, with `p_inter`
/// cross-community noise edges; disconnected leftovers are re-joined by a
/// spanning chain of extra noise edges.
pub fn synth_planted<R: Rng>(params: &SynthParams, rng: &mut R) -> Result<(Graph, Vec<Community>)> {
    if params.n_comm == 0 {
        return Err(Error::Data("n_comm must be positive".into()));
    }
    if params.size_min < 4 || params.size_max > 30 || params.size_min > params.size_max {
        return Err(Error::Data("community sizes must lie within [4, 30]".into()));
    }
    if params.p_intra <= params.p_inter {
        return Err(Error::Data("p_intra must exceed p_inter".into()));
    }
    if !(0.0..=1.0).contains(&params.p_intra) || !(0.0..=1.0).contains(&params.p_inter) {
        return Err(Error::Data("edge probabilities must lie in [0, 1]".into()));
    }

    let mut comms: Vec<Vec<NodeId>> = Vec::with_capacity(params.n_comm);
    let mut next: NodeId = 0;
    for _ in 0..params.n_comm {
        let size = rng.gen_range(params.size_min..=params.size_max);
        comms.push((next..next + size as NodeId).collect());
        next += size as NodeId;
    }
    let n = next as usize;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();

    let jitter = params.p_jitter.clamp(0.0, params.p_intra);
    for members in &comms {
        let p_comm = (params.p_intra - rng.gen_range(0.0..=jitter)).max(params.p_inter);
        // planted triangle on the first three nodes
        edges.push((members[0], members[1]));
        edges.push((members[0], members[2]));
        edges.push((members[1], members[2]));
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                if rng.gen_bool(p_comm) {
                    edges.push((u, v));
                }
            }
        }
        // connect intra-community components with chain edges
        let probe = Graph::from_edges(n, &edges)?;
        if !probe.induced_connected(members) {
            let mut comp = vec![usize::MAX; members.len()];
            let mut n_comp = 0;
            for start in 0..members.len() {
                if comp[start] != usize::MAX {
                    continue;
                }
                let mut stack = vec![start];
                comp[start] = n_comp;
                while let Some(i) = stack.pop() {
                    for &u in probe.neighbors(members[i]) {
                        if let Ok(j) = members.binary_search(&u) {
                            if comp[j] == usize::MAX {
                                comp[j] = n_comp;
                                stack.push(j);
                            }
                        }
                    }
                }
                n_comp += 1;
            }
            for target in 1..n_comp {
                let from: Vec<usize> =
                    (0..members.len()).filter(|&i| comp[i] == target - 1).collect();
                let to: Vec<usize> = (0..members.len()).filter(|&i| comp[i] == target).collect();
                let a = members[from[rng.gen_range(0..from.len())]];
                let b = members[to[rng.gen_range(0..to.len())]];
                edges.push((a.min(b), a.max(b)));
            }
        }
    }

    // cross-community noise
    if params.p_inter > 0.0 {
        for ci in 0..comms.len() {
            for cj in ci + 1..comms.len() {
                for &u in &comms[ci] {
                    for &v in &comms[cj] {
                        if rng.gen_bool(params.p_inter) {
                            edges.push((u.min(v), u.max(v)));
                        }
                    }
                }
            }
        }
    }

    // global connectivity via a spanning chain of noise edges
    let probe = Graph::from_edges(n, &edges)?;
    let mut comp = vec![usize::MAX; n];
    let mut comp_count = 0;
    for start in 0..n as NodeId {
        if comp[start as usize] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start as usize] = comp_count;
        while let Some(v) = stack.pop() {
            for &u in probe.neighbors(v) {
                if comp[u as usize] == usize::MAX {
                    comp[u as usize] = comp_count;
                    stack.push(u);
                }
            }
        }
        comp_count += 1;
    }
    for target in 1..comp_count {
        let from: Vec<NodeId> = (0..n as NodeId)
            .filter(|&v| comp[v as usize] == target - 1)
            .collect();
        let to: Vec<NodeId> = (0..n as NodeId)
            .filter(|&v| comp[v as usize] == target)
            .collect();
        let a = from[rng.gen_range(0..from.len())];
        let b = to[rng.gen_range(0..to.len())];
        edges.push((a.min(b), a.max(b)));
    }

    edges.sort_unstable();
    edges.dedup();
    let g = Graph::from_edges(n, &edges)?;
    let communities: Vec<Community> = comms
        .into_iter()
        .enumerate()
        .map(|(i, members)| Community::new(i, members))
        .collect();
    for c in &communities {
        debug_assert!(g.induced_has_triangle(&c.members));
    }
    Ok((g, communities))
}

/// Preprocessing parameters for labeled corpora.
#[derive(Debug, Clone, Copy)]
pub struct PrepParams {
    /// Drop communities above this size percentile (nearest-rank).
    pub percentile: f64,
    /// Randomly keep at most this many communities after the cut.
    pub sample: usize,
    /// Cross-links added between the two graphs of a hybrid.
    pub cross_links: usize,
}

impl Default for PrepParams {
    fn default() -> Self {
        PrepParams {
            percentile: 90.0,
            sample: 1000,
            cross_links: 5000,
        }
    }
}

/// Nearest-rank percentile of community sizes.
fn size_percentile(comms: &[Community], pct: f64) -> usize {
    let mut sizes: Vec<usize> = comms.iter().map(|c| c.len()).collect();
    sizes.sort_unstable();
    let rank = ((pct / 100.0) * sizes.len() as f64).ceil() as usize;
    sizes[rank.saturating_sub(1).min(sizes.len() - 1)]
}

/// Drop oversized communities and sample the remainder (seeded, stable
/// order: the kept communities appear in their original order).
pub fn prep_filter<R: Rng>(
    comms: &[Community],
    params: &PrepParams,
    rng: &mut R,
) -> Result<Vec<Community>> {
    if comms.is_empty() {
        return Err(Error::Data("no communities to preprocess".into()));
    }
    let cutoff = size_percentile(comms, params.percentile);
    let kept: Vec<&Community> = comms.iter().filter(|c| c.len() <= cutoff).collect();
    let mut order: Vec<usize> = (0..kept.len()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let take = params.sample.min(order.len());
    let mut chosen: Vec<usize> = order[..take].to_vec();
    chosen.sort_unstable();
    Ok(chosen
        .into_iter()
        .enumerate()
        .map(|(new_id, k)| Community::new(new_id, kept[k].members.clone()))
        .collect())
}

/// Merge two graphs into a hybrid: the second graph's dense ids are shifted
/// past the first's, and `cross_links` random edges connect the halves.
/// Returns the merged graph (original ids offset for the second half) and
/// the first graph's communities (the detection targets).
pub fn hybrid_merge<R: Rng>(
    a: &Graph,
    a_comms: &[Community],
    b: &Graph,
    cross_links: usize,
    rng: &mut R,
) -> Result<(Graph, Vec<Community>)> {
    let offset = a.n() as NodeId;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for u in 0..a.n() as NodeId {
        for &v in a.neighbors(u) {
            if u < v {
                edges.push((u, v));
            }
        }
    }
    for u in 0..b.n() as NodeId {
        for &v in b.neighbors(u) {
            if u < v {
                edges.push((u + offset, v + offset));
            }
        }
    }
    for _ in 0..cross_links {
        let u = rng.gen_range(0..a.n() as NodeId);
        let v = offset + rng.gen_range(0..b.n() as NodeId);
        edges.push((u, v));
    }
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::from_edges(a.n() + b.n(), &edges)?;
    Ok((g, a_comms.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::{enumerate_maximal_cliques, OpCounter};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planted_communities_all_contain_a_clique() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = SynthParams {
            n_comm: 100,
            ..SynthParams::default()
        };
        let (g, comms) = synth_planted(&params, &mut rng).unwrap();
        assert_eq!(comms.len(), 100);
        // clique oracle: every community holds at least one size-≥3 clique
        let idx = enumerate_maximal_cliques(&g, None, 1_000_000, &OpCounter::default()).unwrap();
        for c in &comms {
            assert!(
                !idx.top_cliques(&c.members, 1).is_empty(),
                "community {} lost its clique",
                c.id
            );
        }
    }

    #[test]
    fn single_community_works() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = SynthParams {
            n_comm: 1,
            ..SynthParams::default()
        };
        let (g, comms) = synth_planted(&params, &mut rng).unwrap();
        assert_eq!(comms.len(), 1);
        assert_eq!(g.n(), comms[0].len());
    }

    #[test]
    fn zero_inter_probability_still_connects() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = SynthParams {
            n_comm: 8,
            p_inter: 0.0,
            ..SynthParams::default()
        };
        let (g, _) = synth_planted(&params, &mut rng).unwrap();
        let all: Vec<NodeId> = (0..g.n() as NodeId).collect();
        assert!(g.induced_connected(&all));
    }

    #[test]
    fn infeasible_parameters_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(synth_planted(
            &SynthParams {
                p_intra: 0.1,
                p_inter: 0.5,
                ..SynthParams::default()
            },
            &mut rng
        )
        .is_err());
        assert!(synth_planted(
            &SynthParams {
                size_min: 2,
                ..SynthParams::default()
            },
            &mut rng
        )
        .is_err());
        assert!(synth_planted(
            &SynthParams {
                n_comm: 0,
                ..SynthParams::default()
            },
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn same_seed_reproduces_the_graph() {
        let params = SynthParams::default();
        let gen = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            synth_planted(&params, &mut rng).unwrap()
        };
        let (g1, c1) = gen(11);
        let (g2, c2) = gen(11);
        assert_eq!(g1.n(), g2.n());
        assert_eq!(g1.edge_count(), g2.edge_count());
        assert_eq!(c1, c2);
        for v in 0..g1.n() as NodeId {
            assert_eq!(g1.neighbors(v), g2.neighbors(v));
        }
    }

    #[test]
    fn prep_drops_oversized_and_samples() {
        let mut comms: Vec<Community> = (0..20)
            .map(|i| Community::new(i, (0..(3 + i as NodeId)).collect()))
            .collect();
        comms.push(Community::new(20, (0..100).collect()));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let out = prep_filter(
            &comms,
            &PrepParams {
                percentile: 90.0,
                sample: 10,
                cross_links: 0,
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.len(), 10);
        assert!(out.iter().all(|c| c.len() < 100));
        // ids renumbered densely
        for (i, c) in out.iter().enumerate() {
            assert_eq!(c.id, i);
        }
    }

    #[test]
    fn hybrid_merge_offsets_and_links() {
        let a = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let comms = vec![Community::new(0, vec![0, 1, 2])];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (g, kept) = hybrid_merge(&a, &comms, &b, 3, &mut rng).unwrap();
        assert_eq!(g.n(), 5);
        assert!(g.edge_count() >= 3 + 1); // originals plus ≥1 distinct cross link
        assert_eq!(kept, comms);
        assert!(g.has_edge(3, 4)); // b's edge shifted by 3
    }
}
