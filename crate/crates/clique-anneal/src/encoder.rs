//! The subgraph encoder and its two small heads, expressed as tape programs.
//!
//! Forward shape: per-node augment features go through a fully-connected
//! transform, three GCN propagations over the *induced* subgraph (symmetric
//! normalization with self-loops), a projection of the concatenated layer
//! outputs, sum pooling, and finally the origin exponential map onto the
//! ball. The Euclidean norm of the resulting point is the subgraph's stored
//! energy.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::model::{ModelParams, ParamId};
use crate::tape::{Tape, VarId};
use crate::tensor::Tensor;

/// Architecture switches that are not trainable state.
#[derive(Debug, Clone, Copy)]
pub struct EncoderCfg {
    pub curvature: f64,
    /// Apply ReLU after each GCN propagation (the default); `false` keeps the
    /// propagations linear.
    pub gcn_relu: bool,
}

impl Default for EncoderCfg {
    fn default() -> Self {
        EncoderCfg {
            curvature: 1.0,
            gcn_relu: true,
        }
    }
}

/// Embedding handle for one encoded subgraph.
#[derive(Debug, Clone, Copy)]
pub struct SubEmbed {
    /// Point on the ball (1×d).
    pub h: VarId,
    /// Stored energy ‖h‖ (1×1).
    pub energy: VarId,
}

/// Symmetric-normalized adjacency with self-loops over the induced subgraph.
fn normalized_adjacency(g: &Graph, sub: &[NodeId]) -> Tensor {
    let n = sub.len();
    let mut adj = Tensor::zeros(n, n);
    let mut deg = vec![1.0f64; n]; // self-loop
    for (i, &u) in sub.iter().enumerate() {
        *adj.at_mut(i, i) = 1.0;
        for &v in g.neighbors(u) {
            if let Ok(j) = sub.binary_search(&v) {
                *adj.at_mut(i, j) = 1.0;
                deg[i] += 1.0;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if adj.at(i, j) != 0.0 {
                *adj.at_mut(i, j) /= (deg[i] * deg[j]).sqrt();
            }
        }
    }
    adj
}

/// Encode the induced subgraph on `sub` (sorted, non-empty) to a ball point.
pub fn encode_subgraph(
    tape: &mut Tape,
    g: &Graph,
    sub: &[NodeId],
    cfg: &EncoderCfg,
) -> Result<SubEmbed> {
    if sub.is_empty() {
        return Err(Error::Data("cannot encode an empty subgraph".into()));
    }
    let n = sub.len();
    let dim6 = crate::model::AUG_DIM;
    let mut feats = Tensor::zeros(n, dim6);
    for (i, &v) in sub.iter().enumerate() {
        feats.data[i * dim6..(i + 1) * dim6].copy_from_slice(&g.aug_feature(v));
    }
    let feats = tape.konst(feats)?;
    let anorm = tape.konst(normalized_adjacency(g, sub))?;

    let feat_w = tape.param(ParamId::FeatW)?;
    let feat_b = tape.param(ParamId::FeatB)?;
    let lin = tape.matmul_tb(feats, feat_w)?;
    let lin = tape.add_bias_rows(lin, feat_b)?;
    let z0 = tape.relu(lin)?;

    let mut layers = vec![z0];
    let mut z = z0;
    for k in 0..tape.params.gcn_w.len() {
        let prop = tape.matmul(anorm, z)?;
        let w = tape.param(ParamId::Gcn(k))?;
        let mut zk = tape.matmul_tb(prop, w)?;
        if cfg.gcn_relu {
            zk = tape.relu(zk)?;
        }
        layers.push(zk);
        z = zk;
    }

    let cat = tape.concat_cols(layers)?;
    let proj_w = tape.param(ParamId::ProjW)?;
    let proj_b = tape.param(ParamId::ProjB)?;
    let proj = tape.matmul_tb(cat, proj_w)?;
    let proj = tape.add_bias_rows(proj, proj_b)?;
    let zv = tape.relu(proj)?;

    let pooled = tape.sum_rows(zv)?;
    let mapped = tape.exp0(pooled)?;
    let h = tape.clamp_ball(mapped)?;
    let energy = tape.euclid_norm(h)?;
    Ok(SubEmbed { h, energy })
}

/// Interface energy of node `v` against subgraph `sub`:
/// `Softplus(W_I·[f_v^a ‖ f_{v,sub}^e] + b_I)`, strictly positive.
/// `mis_num` is the subgraph's uncovered-node count (precompute it once per
/// subgraph via `CliqueIndex::mis_num`).
pub fn interface_energy(
    tape: &mut Tape,
    g: &Graph,
    v: NodeId,
    sub: &[NodeId],
    mis_num: usize,
) -> Result<VarId> {
    let aug = g.aug_feature(v);
    let mut f = Vec::with_capacity(crate::model::INTF_DIM);
    f.extend_from_slice(&aug);
    f.push(g.links_into(v, sub) as f64);
    f.push(sub.len() as f64);
    f.push(mis_num as f64);
    let f = tape.konst(Tensor::row_vector(f))?;
    let w = tape.param(ParamId::IntfW)?;
    let b = tape.param(ParamId::IntfB)?;
    let lin = tape.matmul_tb(f, w)?;
    let lin = tape.add_bias_rows(lin, b)?;
    tape.softplus(lin)
}

/// Triplet integrity score of an encoded subgraph: softmax over three linear
/// heads applied to `[h ‖ h̄]` where `h̄` is the unit-normalized embedding
/// (the zero vector at the origin). Index 0/1/2 = undergrown / equilibrium /
/// overgrown.
pub fn integrity_score(tape: &mut Tape, h: VarId) -> Result<VarId> {
    let hbar = tape.unit_normalize(h)?;
    let cat = tape.concat_cols(vec![h, hbar])?;
    let mut logits = Vec::with_capacity(3);
    for k in 0..3 {
        let w = tape.param(ParamId::IntegW(k))?;
        let b = tape.param(ParamId::IntegB(k))?;
        let lin = tape.matmul_tb(cat, w)?;
        let lin = tape.add_bias_rows(lin, b)?;
        logits.push(lin);
    }
    let stacked = tape.concat_cols(logits)?;
    tape.softmax_row(stacked)
}

/// Core-filter probability for node `v`: logistic over
/// `[f_v^a ‖ mean-neighbor f^a]`.
pub fn core_score(tape: &mut Tape, g: &Graph, v: NodeId) -> Result<VarId> {
    let mut f = Vec::with_capacity(crate::model::CORE_DIM);
    f.extend_from_slice(&g.aug_feature(v));
    f.extend_from_slice(&g.mean_neighbor_aug(v));
    let f = tape.konst(Tensor::row_vector(f))?;
    let w = tape.param(ParamId::CoreW)?;
    let b = tape.param(ParamId::CoreB)?;
    let lin = tape.matmul_tb(f, w)?;
    let lin = tape.add_bias_rows(lin, b)?;
    tape.sigmoid(lin)
}

/// Forward-only embedding: the ball point and its stored energy.
pub fn embed_values(
    params: &ModelParams,
    g: &Graph,
    sub: &[NodeId],
    cfg: &EncoderCfg,
) -> Result<(Vec<f64>, f64)> {
    let mut tape = Tape::new(params, cfg.curvature);
    let e = encode_subgraph(&mut tape, g, sub, cfg)?;
    Ok((tape.value(e.h).data.clone(), tape.value(e.energy).item()))
}

/// Forward-only integrity triplet of a subgraph.
pub fn integrity_values(
    params: &ModelParams,
    g: &Graph,
    sub: &[NodeId],
    cfg: &EncoderCfg,
) -> Result<[f64; 3]> {
    let mut tape = Tape::new(params, cfg.curvature);
    let e = encode_subgraph(&mut tape, g, sub, cfg)?;
    let y = integrity_score(&mut tape, e.h)?;
    let v = tape.value(y);
    Ok([v.data[0], v.data[1], v.data[2]])
}

/// Forward-only interface energy of `v` against `sub`.
pub fn interface_energy_value(
    params: &ModelParams,
    g: &Graph,
    v: NodeId,
    sub: &[NodeId],
    mis_num: usize,
    cfg: &EncoderCfg,
) -> Result<f64> {
    let mut tape = Tape::new(params, cfg.curvature);
    let e = interface_energy(&mut tape, g, v, sub, mis_num)?;
    Ok(tape.value(e).item())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_graph() -> Graph {
        Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap()
    }

    #[test]
    fn zero_params_embed_to_origin() {
        let g = small_graph();
        let params = ModelParams::zeros(8);
        let cfg = EncoderCfg::default();
        let (h, e) = embed_values(&params, &g, &[0, 1, 2], &cfg).unwrap();
        assert!(h.iter().all(|&v| v == 0.0));
        assert_eq!(e, 0.0);
    }

    #[test]
    fn singleton_pooling_equals_node_embedding() {
        let g = small_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = ModelParams::init(8, 1e-2, &mut rng);
        let cfg = EncoderCfg::default();
        // For a singleton subgraph the normalized adjacency is the 1×1
        // identity, so pooling is exactly the node embedding: encoding twice
        // must agree with itself and differ across nodes in general.
        let (h0, _) = embed_values(&params, &g, &[0], &cfg).unwrap();
        let (h0b, _) = embed_values(&params, &g, &[0], &cfg).unwrap();
        assert_eq!(h0, h0b);
        let (h3, _) = embed_values(&params, &g, &[3], &cfg).unwrap();
        assert_ne!(h0, h3);
    }

    #[test]
    fn relabeling_preserves_embedding() {
        let edges = [(0u32, 1u32), (0, 2), (1, 2), (2, 3), (3, 4)];
        let g = Graph::from_edges(5, &edges).unwrap();
        let perm = [3u32, 0, 4, 1, 2];
        let mapped: Vec<(NodeId, NodeId)> = edges
            .iter()
            .map(|&(a, b)| (perm[a as usize], perm[b as usize]))
            .collect();
        let h = Graph::from_edges(5, &mapped).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let params = ModelParams::init(8, 1e-2, &mut rng);
        let cfg = EncoderCfg::default();
        let sub: Vec<NodeId> = vec![0, 1, 2, 3];
        let mut mapped_sub: Vec<NodeId> = sub.iter().map(|&v| perm[v as usize]).collect();
        mapped_sub.sort_unstable();
        let (ha, ea) = embed_values(&params, &g, &sub, &cfg).unwrap();
        let (hb, eb) = embed_values(&params, &h, &mapped_sub, &cfg).unwrap();
        for (x, y) in ha.iter().zip(&hb) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
        assert!((ea - eb).abs() < 1e-9);
    }

    #[test]
    fn empty_subgraph_is_error() {
        let g = small_graph();
        let params = ModelParams::zeros(4);
        assert!(embed_values(&params, &g, &[], &EncoderCfg::default()).is_err());
    }

    #[test]
    fn interface_energy_is_positive_and_ln2_at_zero() {
        let g = small_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = ModelParams::init(8, 1e-2, &mut rng);
        let cfg = EncoderCfg::default();
        let e = interface_energy_value(&params, &g, 3, &[0, 1, 2], 0, &cfg).unwrap();
        assert!(e > 0.0);
        let zero = ModelParams::zeros(8);
        let e0 = interface_energy_value(&zero, &g, 3, &[0, 1, 2], 0, &cfg).unwrap();
        assert!((e0 - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn integrity_sums_to_one_and_is_uniform_for_equal_heads() {
        let g = small_graph();
        let cfg = EncoderCfg::default();
        let zero = ModelParams::zeros(8);
        let y = integrity_values(&zero, &g, &[0, 1, 2], &cfg).unwrap();
        for v in y {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let params = ModelParams::init(8, 1e-2, &mut rng);
            let y = integrity_values(&params, &g, &[0, 1, 2, 3], &cfg).unwrap();
            let sum: f64 = y.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn encoder_gradients_match_finite_differences() {
        let g = small_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let params = ModelParams::init(6, 1e-2, &mut rng);
        let cfg = EncoderCfg::default();
        let loss = |p: &ModelParams| -> f64 {
            let mut tape = Tape::new(p, cfg.curvature);
            let e = encode_subgraph(&mut tape, &g, &[0, 1, 2, 3], &cfg).unwrap();
            let y = integrity_score(&mut tape, e.h).unwrap();
            let bce = tape.bce_one_hot(y, 1).unwrap();
            let root = tape.add_n(vec![bce, e.energy]).unwrap();
            tape.value(root).item()
        };
        let mut tape = Tape::new(&params, cfg.curvature);
        let e = encode_subgraph(&mut tape, &g, &[0, 1, 2, 3], &cfg).unwrap();
        let y = integrity_score(&mut tape, e.h).unwrap();
        let bce = tape.bce_one_hot(y, 1).unwrap();
        let root = tape.add_n(vec![bce, e.energy]).unwrap();
        let (grads, _) = tape.backward(root).unwrap();

        let h = 1e-5;
        let mut checked = 0;
        for id in params.ids() {
            let t = params.get(id);
            let probe = [0usize, t.data.len() / 2, t.data.len().saturating_sub(1)];
            for &i in probe.iter().take_while(|_| !t.data.is_empty()) {
                let mut plus = params.clone();
                plus.get_mut(id).data[i] += h;
                let mut minus = params.clone();
                minus.get_mut(id).data[i] -= h;
                let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let a = grads.get(id).data[i];
                let denom = a.abs().max(fd.abs());
                if denom > 1e-6 {
                    assert!(
                        ((a - fd) / denom).abs() < 1e-4,
                        "{:?}[{i}]: analytic {a} vs fd {fd}",
                        id
                    );
                }
                checked += 1;
            }
        }
        assert!(checked > 20);
    }
}
