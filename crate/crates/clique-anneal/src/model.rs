//! Trainable tensors, their seeded initialization, the Adam optimizer, and
//! the versioned binary checkpoint format.

use crate::error::{Error, Result};
use crate::tensor::Tensor;
use rand::Rng;
use std::io::{Read, Write};
use std::path::Path;

/// Default number of GCN propagation layers.
pub const GCN_LAYERS: usize = 3;
/// Augment-feature width.
pub const AUG_DIM: usize = 6;
/// Augment + external feature width consumed by the interface-energy head.
pub const INTF_DIM: usize = 9;
/// Core-filter feature width (augment ‖ mean neighbor augment).
pub const CORE_DIM: usize = 12;

/// Identifies one trainable tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamId {
    FeatW,
    FeatB,
    Gcn(usize),
    ProjW,
    ProjB,
    IntfW,
    IntfB,
    IntegW(usize),
    IntegB(usize),
    CoreW,
    CoreB,
}

impl ParamId {
    /// Canonical parameter order (checkpoint layout and optimizer walk).
    pub fn all(gcn_layers: usize) -> Vec<ParamId> {
        let mut ids = vec![ParamId::FeatW, ParamId::FeatB];
        ids.extend((0..gcn_layers).map(ParamId::Gcn));
        ids.extend([ParamId::ProjW, ParamId::ProjB, ParamId::IntfW, ParamId::IntfB]);
        for k in 0..3 {
            ids.push(ParamId::IntegW(k));
            ids.push(ParamId::IntegB(k));
        }
        ids.extend([ParamId::CoreW, ParamId::CoreB]);
        ids
    }

    pub fn name(&self) -> String {
        match self {
            ParamId::FeatW => "feat_w".into(),
            ParamId::FeatB => "feat_b".into(),
            ParamId::Gcn(k) => format!("gcn_w{k}"),
            ParamId::ProjW => "proj_w".into(),
            ParamId::ProjB => "proj_b".into(),
            ParamId::IntfW => "intf_w".into(),
            ParamId::IntfB => "intf_b".into(),
            ParamId::IntegW(k) => format!("integ_w{k}"),
            ParamId::IntegB(k) => format!("integ_b{k}"),
            ParamId::CoreW => "core_w".into(),
            ParamId::CoreB => "core_b".into(),
        }
    }
}

/// All trainable tensors. Weights are stored `out×in` and applied as `x·Wᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub dim: usize,
    pub feat_w: Tensor,
    pub feat_b: Tensor,
    pub gcn_w: Vec<Tensor>,
    pub proj_w: Tensor,
    pub proj_b: Tensor,
    pub intf_w: Tensor,
    pub intf_b: Tensor,
    pub integ_w: Vec<Tensor>,
    pub integ_b: Vec<Tensor>,
    pub core_w: Tensor,
    pub core_b: Tensor,
}

fn glorot<R: Rng>(rows: usize, cols: usize, gain: f64, rng: &mut R) -> Tensor {
    let a = gain * (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.gen_range(-a..a)).collect();
    Tensor::from_vec(rows, cols, data)
}

impl ModelParams {
    /// Seeded fan-based uniform initialization with the default layer count;
    /// biases start at zero. The projection layer takes an extra gain so that
    /// freshly pooled embeddings land in the responsive region of the ball
    /// map instead of saturating.
    pub fn init<R: Rng>(dim: usize, proj_gain: f64, rng: &mut R) -> ModelParams {
        Self::init_with_layers(dim, GCN_LAYERS, proj_gain, rng)
    }

    pub fn init_with_layers<R: Rng>(
        dim: usize,
        layers: usize,
        proj_gain: f64,
        rng: &mut R,
    ) -> ModelParams {
        ModelParams {
            dim,
            feat_w: glorot(dim, AUG_DIM, 1.0, rng),
            feat_b: Tensor::zeros(1, dim),
            gcn_w: (0..layers).map(|_| glorot(dim, dim, 1.0, rng)).collect(),
            proj_w: glorot(dim, (layers + 1) * dim, proj_gain, rng),
            proj_b: Tensor::zeros(1, dim),
            intf_w: glorot(1, INTF_DIM, 1.0, rng),
            intf_b: Tensor::zeros(1, 1),
            integ_w: (0..3).map(|_| glorot(1, 2 * dim, 1.0, rng)).collect(),
            integ_b: (0..3).map(|_| Tensor::zeros(1, 1)).collect(),
            core_w: glorot(1, CORE_DIM, 1.0, rng),
            core_b: Tensor::zeros(1, 1),
        }
    }

    pub fn zeros(dim: usize) -> ModelParams {
        Self::zeros_with_layers(dim, GCN_LAYERS)
    }

    pub fn zeros_with_layers(dim: usize, layers: usize) -> ModelParams {
        ModelParams {
            dim,
            feat_w: Tensor::zeros(dim, AUG_DIM),
            feat_b: Tensor::zeros(1, dim),
            gcn_w: (0..layers).map(|_| Tensor::zeros(dim, dim)).collect(),
            proj_w: Tensor::zeros(dim, (layers + 1) * dim),
            proj_b: Tensor::zeros(1, dim),
            intf_w: Tensor::zeros(1, INTF_DIM),
            intf_b: Tensor::zeros(1, 1),
            integ_w: (0..3).map(|_| Tensor::zeros(1, 2 * dim)).collect(),
            integ_b: (0..3).map(|_| Tensor::zeros(1, 1)).collect(),
            core_w: Tensor::zeros(1, CORE_DIM),
            core_b: Tensor::zeros(1, 1),
        }
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        match id {
            ParamId::FeatW => &self.feat_w,
            ParamId::FeatB => &self.feat_b,
            ParamId::Gcn(k) => &self.gcn_w[k],
            ParamId::ProjW => &self.proj_w,
            ParamId::ProjB => &self.proj_b,
            ParamId::IntfW => &self.intf_w,
            ParamId::IntfB => &self.intf_b,
            ParamId::IntegW(k) => &self.integ_w[k],
            ParamId::IntegB(k) => &self.integ_b[k],
            ParamId::CoreW => &self.core_w,
            ParamId::CoreB => &self.core_b,
        }
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        match id {
            ParamId::FeatW => &mut self.feat_w,
            ParamId::FeatB => &mut self.feat_b,
            ParamId::Gcn(k) => &mut self.gcn_w[k],
            ParamId::ProjW => &mut self.proj_w,
            ParamId::ProjB => &mut self.proj_b,
            ParamId::IntfW => &mut self.intf_w,
            ParamId::IntfB => &mut self.intf_b,
            ParamId::IntegW(k) => &mut self.integ_w[k],
            ParamId::IntegB(k) => &mut self.integ_b[k],
            ParamId::CoreW => &mut self.core_w,
            ParamId::CoreB => &mut self.core_b,
        }
    }

    pub fn ids(&self) -> Vec<ParamId> {
        ParamId::all(self.gcn_w.len())
    }
}

/// One tensor of gradient per parameter tensor.
#[derive(Debug, Clone)]
pub struct Gradients {
    inner: ModelParams,
}

impl Gradients {
    pub fn zeros_like(params: &ModelParams) -> Gradients {
        Gradients {
            inner: ModelParams::zeros_with_layers(params.dim, params.gcn_w.len()),
        }
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        self.inner.get(id)
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        self.inner.get_mut(id)
    }

    pub fn ids(&self) -> Vec<ParamId> {
        self.inner.ids()
    }

    pub fn is_finite(&self) -> bool {
        self.ids().iter().all(|&id| self.get(id).is_finite())
    }
}

/// Adam with β₁=0.9, β₂=0.999, ε=1e-8.
pub struct Adam {
    lr: f64,
    t: u64,
    m: Gradients,
    v: Gradients,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

impl Adam {
    pub fn new(lr: f64, params: &ModelParams) -> Adam {
        Adam {
            lr,
            t: 0,
            m: Gradients::zeros_like(params),
            v: Gradients::zeros_like(params),
        }
    }

    /// Update every parameter accepted by `filter`.
    pub fn step_filtered<F: Fn(ParamId) -> bool>(
        &mut self,
        params: &mut ModelParams,
        grads: &Gradients,
        filter: F,
    ) {
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        for id in params.ids() {
            if !filter(id) {
                continue;
            }
            let g = grads.get(id);
            let m = self.m.get_mut(id);
            for (mi, gi) in m.data.iter_mut().zip(&g.data) {
                *mi = BETA1 * *mi + (1.0 - BETA1) * gi;
            }
            let v = self.v.get_mut(id);
            for (vi, gi) in v.data.iter_mut().zip(&g.data) {
                *vi = BETA2 * *vi + (1.0 - BETA2) * gi * gi;
            }
            let m = self.m.get(id);
            let v = self.v.get(id);
            let p = params.get_mut(id);
            for ((pi, mi), vi) in p.data.iter_mut().zip(&m.data).zip(&v.data) {
                let mhat = mi / bc1;
                let vhat = vi / bc2;
                *pi -= self.lr * mhat / (vhat.sqrt() + EPS);
            }
        }
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &Gradients) {
        self.step_filtered(params, grads, |_| true);
    }
}

const MAGIC: &[u8; 4] = b"CLQA";
const VERSION: u32 = 1;

/// A loaded checkpoint: parameters plus the config echo and seed recorded at
/// save time.
pub struct Checkpoint {
    pub params: ModelParams,
    pub config_echo: String,
    pub seed: u64,
}

/// Binary layout: magic, version, named-tensor table (name, shape, row-major
/// little-endian f64), config echo, RNG seed. Saving the result of a load
/// reproduces the file byte for byte.
pub fn save_checkpoint(
    path: &Path,
    params: &ModelParams,
    config_echo: &str,
    seed: u64,
) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    let ids = params.ids();
    buf.extend_from_slice(&(ids.len() as u32).to_le_bytes());
    for id in ids {
        let name = id.name();
        let t = params.get(id);
        buf.extend_from_slice(&(name.len() as u16).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&(t.rows as u32).to_le_bytes());
        buf.extend_from_slice(&(t.cols as u32).to_le_bytes());
        for v in &t.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf.extend_from_slice(&(config_echo.len() as u32).to_le_bytes());
    buf.extend_from_slice(config_echo.as_bytes());
    buf.extend_from_slice(&seed.to_le_bytes());
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?
        .read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let take = |pos: &mut usize, n: usize| -> Result<&[u8]> {
        if *pos + n > bytes.len() {
            return Err(Error::Data(format!("{}: truncated checkpoint", path.display())));
        }
        let s = &bytes[*pos..*pos + n];
        *pos += n;
        Ok(s)
    };
    if take(&mut pos, 4)? != MAGIC {
        return Err(Error::Data(format!("{}: not a checkpoint file", path.display())));
    }
    let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Data(format!(
            "{}: unsupported checkpoint version {version}",
            path.display()
        )));
    }
    let count = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
    let mut table: Vec<(String, Tensor)> = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = u16::from_le_bytes(take(&mut pos, 2)?.try_into().unwrap()) as usize;
        let name = String::from_utf8(take(&mut pos, name_len)?.to_vec())
            .map_err(|_| Error::Data(format!("{}: bad tensor name", path.display())))?;
        let rows = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let raw = take(&mut pos, rows * cols * 8)?;
        let data: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        table.push((name, Tensor::from_vec(rows, cols, data)));
    }
    let cfg_len = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
    let config_echo = String::from_utf8(take(&mut pos, cfg_len)?.to_vec())
        .map_err(|_| Error::Data(format!("{}: bad config echo", path.display())))?;
    let seed = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());

    // Reassemble and validate shapes against the architecture they imply.
    let feat_w = table
        .iter()
        .find(|(n, _)| n == "feat_w")
        .ok_or_else(|| Error::Data(format!("{}: missing feat_w", path.display())))?;
    let dim = feat_w.1.rows;
    let layers = table.iter().filter(|(n, _)| n.starts_with("gcn_w")).count();
    let mut params = ModelParams::zeros_with_layers(dim, layers);
    let ids = params.ids();
    if ids.len() != table.len() {
        return Err(Error::Data(format!(
            "{}: expected {} tensors, found {}",
            path.display(),
            ids.len(),
            table.len()
        )));
    }
    for (id, (name, tensor)) in ids.into_iter().zip(table) {
        if id.name() != name {
            return Err(Error::Data(format!(
                "{}: unexpected tensor {name:?} (wanted {:?})",
                path.display(),
                id.name()
            )));
        }
        let expect = params.get(id);
        if (expect.rows, expect.cols) != (tensor.rows, tensor.cols) {
            return Err(Error::Data(format!(
                "{}: shape mismatch for {name}: {}x{} (wanted {}x{})",
                path.display(),
                tensor.rows,
                tensor.cols,
                expect.rows,
                expect.cols
            )));
        }
        *params.get_mut(id) = tensor;
    }
    Ok(Checkpoint {
        params,
        config_echo,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adam_zero_gradient_leaves_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = ModelParams::init(8, 1.0, &mut rng);
        let before = p.clone();
        let g = Gradients::zeros_like(&p);
        let mut adam = Adam::new(1e-3, &p);
        adam.step(&mut p, &g);
        assert_eq!(p, before);
    }

    #[test]
    fn adam_zero_lr_leaves_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut p = ModelParams::init(8, 1.0, &mut rng);
        let before = p.clone();
        let mut g = Gradients::zeros_like(&p);
        g.get_mut(ParamId::IntfB).data[0] = 1.0;
        let mut adam = Adam::new(0.0, &p);
        adam.step(&mut p, &g);
        assert_eq!(p, before);
    }

    #[test]
    fn adam_minimizes_quadratic() {
        // f(x) = (x − 3)², tracked through the intf_b slot.
        let mut p = ModelParams::zeros(4);
        let mut adam = Adam::new(0.05, &p);
        for _ in 0..500 {
            let x = p.intf_b.data[0];
            let mut g = Gradients::zeros_like(&p);
            g.get_mut(ParamId::IntfB).data[0] = 2.0 * (x - 3.0);
            adam.step_filtered(&mut p, &g, |id| id == ParamId::IntfB);
        }
        assert!((p.intf_b.data[0] - 3.0).abs() < 1e-3);
    }

    #[test]
    fn checkpoint_round_trip_is_byte_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ModelParams::init(16, 1e-3, &mut rng);
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.ckpt");
        let b = dir.path().join("b.ckpt");
        save_checkpoint(&a, &p, "{\"dim\":16}", 42).unwrap();
        let loaded = load_checkpoint(&a).unwrap();
        assert_eq!(loaded.seed, 42);
        assert_eq!(loaded.config_echo, "{\"dim\":16}");
        save_checkpoint(&b, &loaded.params, &loaded.config_echo, loaded.seed).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn checkpoint_rejects_version_and_shape_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = ModelParams::init(8, 1.0, &mut rng);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.ckpt");
        save_checkpoint(&path, &p, "", 0).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 9; // version
        std::fs::write(&path, &bytes).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
