//! Recorded forward pass with hand-derived reverse-mode adjoints for the
//! fixed op set this model uses: linear layers, the normalized-adjacency
//! propagation, ReLU/softplus/softmax/sigmoid, sum pooling, the ball map,
//! Möbius addition, hyperbolic distance, hinges, and the two cross-entropy
//! forms. Nothing here is a general autodiff; every adjoint is written for
//! its op.
//!
//! Ops are recorded define-by-run, so node indices are already a topological
//! order and `backward` is a single reverse sweep. Every produced value is
//! checked finite; the offending op is named in the error.

use crate::error::{Error, Result};
use crate::hyperbolic::{clamp_ball, dtanh_over_z_over_z, exp0_raw, tanh_over_z, BALL_EPS};
use crate::model::{Gradients, ModelParams, ParamId};
use crate::tensor::{dot, matmul, matmul_ta, matmul_tb, norm, Tensor};

pub type VarId = usize;

#[derive(Debug, Clone)]
enum Op {
    Const,
    Param(ParamId),
    MatMul(VarId, VarId),
    MatMulTB(VarId, VarId),
    AddBiasRows(VarId, VarId),
    Relu(VarId),
    ConcatCols(Vec<VarId>),
    SumRows(VarId),
    Exp0(VarId),
    ClampBall(VarId),
    MobiusAdd(VarId, VarId),
    HypDist(VarId, VarId),
    EuclidNorm(VarId),
    UnitNormalize(VarId),
    Softplus(VarId),
    SoftmaxRow(VarId),
    Sigmoid(VarId),
    Sub(VarId, VarId),
    AddN(Vec<VarId>),
    AffineConst(VarId, f64),
    BceOneHot(VarId, usize),
    BceBinary(VarId, f64),
}

impl Op {
    fn name(&self) -> &'static str {
        match self {
            Op::Const => "const",
            Op::Param(_) => "param",
            Op::MatMul(..) => "matmul",
            Op::MatMulTB(..) => "matmul_tb",
            Op::AddBiasRows(..) => "add_bias",
            Op::Relu(_) => "relu",
            Op::ConcatCols(_) => "concat",
            Op::SumRows(_) => "sum_rows",
            Op::Exp0(_) => "exp0",
            Op::ClampBall(_) => "clamp_ball",
            Op::MobiusAdd(..) => "mobius_add",
            Op::HypDist(..) => "hyp_dist",
            Op::EuclidNorm(_) => "euclid_norm",
            Op::UnitNormalize(_) => "unit_normalize",
            Op::Softplus(_) => "softplus",
            Op::SoftmaxRow(_) => "softmax",
            Op::Sigmoid(_) => "sigmoid",
            Op::Sub(..) => "sub",
            Op::AddN(_) => "add_n",
            Op::AffineConst(..) => "affine",
            Op::BceOneHot(..) => "bce_one_hot",
            Op::BceBinary(..) => "bce_binary",
        }
    }
}

struct Node {
    op: Op,
    value: Tensor,
}

const LOG_CLAMP: f64 = 1e-12;

fn softplus(x: f64) -> f64 {
    // ln(1+eˣ) without overflow.
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// A recorded computation over one parameter set and curvature.
pub struct Tape<'p> {
    pub params: &'p ModelParams,
    pub curvature: f64,
    nodes: Vec<Node>,
}

impl<'p> Tape<'p> {
    pub fn new(params: &'p ModelParams, curvature: f64) -> Tape<'p> {
        Tape {
            params,
            curvature,
            nodes: Vec::new(),
        }
    }

    pub fn value(&self, id: VarId) -> &Tensor {
        &self.nodes[id].value
    }

    fn push(&mut self, op: Op, value: Tensor) -> Result<VarId> {
        if !value.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite value in {} (node {})",
                op.name(),
                self.nodes.len()
            )));
        }
        self.nodes.push(Node { op, value });
        Ok(self.nodes.len() - 1)
    }

    pub fn konst(&mut self, t: Tensor) -> Result<VarId> {
        self.push(Op::Const, t)
    }

    pub fn scalar(&mut self, v: f64) -> Result<VarId> {
        self.konst(Tensor::scalar(v))
    }

    pub fn param(&mut self, id: ParamId) -> Result<VarId> {
        let value = self.params.get(id).clone();
        self.push(Op::Param(id), value)
    }

    pub fn matmul(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let v = matmul(self.value(a), self.value(b));
        self.push(Op::MatMul(a, b), v)
    }

    /// `a · bᵀ`: the layer application for `out×in` weights.
    pub fn matmul_tb(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let v = matmul_tb(self.value(a), self.value(b));
        self.push(Op::MatMulTB(a, b), v)
    }

    pub fn add_bias_rows(&mut self, m: VarId, bias: VarId) -> Result<VarId> {
        let (mv, bv) = (self.value(m), self.value(bias));
        assert_eq!(bv.rows, 1);
        assert_eq!(bv.cols, mv.cols);
        let mut out = mv.clone();
        for r in 0..out.rows {
            for c in 0..out.cols {
                *out.at_mut(r, c) += bv.at(0, c);
            }
        }
        self.push(Op::AddBiasRows(m, bias), out)
    }

    pub fn relu(&mut self, a: VarId) -> Result<VarId> {
        let mut out = self.value(a).clone();
        for v in &mut out.data {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        self.push(Op::Relu(a), out)
    }

    pub fn concat_cols(&mut self, parts: Vec<VarId>) -> Result<VarId> {
        let rows = self.value(parts[0]).rows;
        let cols: usize = parts.iter().map(|&p| self.value(p).cols).sum();
        let mut out = Tensor::zeros(rows, cols);
        let mut off = 0;
        for &p in &parts {
            let t = self.value(p);
            assert_eq!(t.rows, rows);
            for r in 0..rows {
                out.data[r * cols + off..r * cols + off + t.cols].copy_from_slice(t.row(r));
            }
            off += t.cols;
        }
        self.push(Op::ConcatCols(parts), out)
    }

    pub fn sum_rows(&mut self, a: VarId) -> Result<VarId> {
        let t = self.value(a);
        let mut out = Tensor::zeros(1, t.cols);
        for r in 0..t.rows {
            for (o, v) in out.data.iter_mut().zip(t.row(r)) {
                *o += v;
            }
        }
        self.push(Op::SumRows(a), out)
    }

    pub fn exp0(&mut self, a: VarId) -> Result<VarId> {
        let t = self.value(a);
        assert_eq!(t.rows, 1);
        let y = exp0_raw(&t.data, self.curvature);
        self.push(Op::Exp0(a), Tensor::row_vector(y))
    }

    pub fn clamp_ball(&mut self, a: VarId) -> Result<VarId> {
        let mut y = self.value(a).clone();
        clamp_ball(&mut y.data, self.curvature);
        self.push(Op::ClampBall(a), y)
    }

    pub fn mobius_add(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let (av, bv) = (self.value(a), self.value(b));
        assert_eq!(av.cols, bv.cols);
        let y = crate::hyperbolic::mobius_add_raw(&av.data, &bv.data, self.curvature)?;
        self.push(Op::MobiusAdd(a, b), Tensor::row_vector(y))
    }

    pub fn hyp_dist(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let (av, bv) = (self.value(a), self.value(b));
        let d = crate::hyperbolic::hyp_distance_raw(&av.data, &bv.data, self.curvature)?;
        self.push(Op::HypDist(a, b), Tensor::scalar(d))
    }

    pub fn euclid_norm(&mut self, a: VarId) -> Result<VarId> {
        let v = norm(&self.value(a).data);
        self.push(Op::EuclidNorm(a), Tensor::scalar(v))
    }

    /// `x/‖x‖`, defined as the zero vector at the origin.
    pub fn unit_normalize(&mut self, a: VarId) -> Result<VarId> {
        let t = self.value(a);
        let r = norm(&t.data);
        let y = if r == 0.0 {
            t.clone()
        } else {
            Tensor::row_vector(t.data.iter().map(|v| v / r).collect())
        };
        self.push(Op::UnitNormalize(a), y)
    }

    pub fn softplus(&mut self, a: VarId) -> Result<VarId> {
        let mut out = self.value(a).clone();
        for v in &mut out.data {
            *v = softplus(*v);
        }
        self.push(Op::Softplus(a), out)
    }

    pub fn softmax_row(&mut self, a: VarId) -> Result<VarId> {
        let t = self.value(a);
        assert_eq!(t.rows, 1);
        let max = t.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = t.data.iter().map(|v| (v - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let y = exps.into_iter().map(|e| e / sum).collect();
        self.push(Op::SoftmaxRow(a), Tensor::row_vector(y))
    }

    pub fn sigmoid(&mut self, a: VarId) -> Result<VarId> {
        let mut out = self.value(a).clone();
        for v in &mut out.data {
            *v = sigmoid(*v);
        }
        self.push(Op::Sigmoid(a), out)
    }

    pub fn sub(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let (av, bv) = (self.value(a), self.value(b));
        assert_eq!((av.rows, av.cols), (bv.rows, bv.cols));
        let data = av.data.iter().zip(&bv.data).map(|(x, y)| x - y).collect();
        let v = Tensor::from_vec(av.rows, av.cols, data);
        self.push(Op::Sub(a, b), v)
    }

    pub fn add_n(&mut self, parts: Vec<VarId>) -> Result<VarId> {
        assert!(!parts.is_empty());
        let mut out = self.value(parts[0]).clone();
        for &p in &parts[1..] {
            out.add_assign(self.value(p));
        }
        self.push(Op::AddN(parts), out)
    }

    /// `mul·x + add`, elementwise with constant coefficients.
    pub fn affine(&mut self, a: VarId, mul: f64, add: f64) -> Result<VarId> {
        let mut out = self.value(a).clone();
        for v in &mut out.data {
            *v = mul * *v + add;
        }
        self.push(Op::AffineConst(a, mul), out)
    }

    /// `max(0, x)` on a scalar; the subgradient at exactly zero is zero.
    pub fn hinge(&mut self, a: VarId) -> Result<VarId> {
        self.relu(a)
    }

    /// Binary cross-entropy of a probability row against a one-hot target,
    /// logs clamped at 1e-12.
    pub fn bce_one_hot(&mut self, probs: VarId, hot: usize) -> Result<VarId> {
        let p = self.value(probs);
        assert_eq!(p.rows, 1);
        let mut loss = 0.0;
        for (k, &pk) in p.data.iter().enumerate() {
            if k == hot {
                loss -= pk.max(LOG_CLAMP).ln();
            } else {
                loss -= (1.0 - pk).max(LOG_CLAMP).ln();
            }
        }
        self.push(Op::BceOneHot(probs, hot), Tensor::scalar(loss))
    }

    /// Binary cross-entropy of a scalar probability against label `y`.
    pub fn bce_binary(&mut self, prob: VarId, y: f64) -> Result<VarId> {
        let p = self.value(prob).item();
        let loss = -(y * p.max(LOG_CLAMP).ln() + (1.0 - y) * (1.0 - p).max(LOG_CLAMP).ln());
        self.push(Op::BceBinary(prob, y), Tensor::scalar(loss))
    }

    /// Reverse sweep from a scalar root. Returns parameter gradients plus the
    /// per-node adjoints (used by finite-difference checks on const leaves).
    pub fn backward(&self, root: VarId) -> Result<(Gradients, Vec<Option<Tensor>>)> {
        assert_eq!(self.value(root).data.len(), 1, "backward root must be scalar");
        let c = self.curvature;
        let mut adj: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        adj[root] = Some(Tensor::scalar(1.0));
        let mut out = Gradients::zeros_like(self.params);

        for idx in (0..self.nodes.len()).rev() {
            let g = match adj[idx].take() {
                Some(g) => g,
                None => {
                    adj[idx] = None;
                    continue;
                }
            };
            if !g.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite gradient at {} (node {idx})",
                    self.nodes[idx].op.name()
                )));
            }
            let acc = |adj: &mut Vec<Option<Tensor>>, id: VarId, delta: Tensor| {
                match &mut adj[id] {
                    Some(t) => t.add_assign(&delta),
                    slot @ None => *slot = Some(delta),
                }
            };
            match &self.nodes[idx].op {
                Op::Const => {
                    adj[idx] = Some(g); // retain for FD probes on leaves
                    continue;
                }
                Op::Param(pid) => {
                    out.get_mut(*pid).add_assign(&g);
                }
                Op::MatMul(a, b) => {
                    let ga = matmul_tb(&g, self.value(*b));
                    let gb = matmul_ta(self.value(*a), &g);
                    acc(&mut adj, *a, ga);
                    acc(&mut adj, *b, gb);
                }
                Op::MatMulTB(a, b) => {
                    let ga = matmul(&g, self.value(*b));
                    let gb = matmul_ta(&g, self.value(*a));
                    acc(&mut adj, *a, ga);
                    acc(&mut adj, *b, gb);
                }
                Op::AddBiasRows(m, bias) => {
                    let mut gb = Tensor::zeros(1, g.cols);
                    for r in 0..g.rows {
                        for (o, v) in gb.data.iter_mut().zip(g.row(r)) {
                            *o += v;
                        }
                    }
                    acc(&mut adj, *m, g.clone());
                    acc(&mut adj, *bias, gb);
                }
                Op::Relu(a) => {
                    let av = self.value(*a);
                    let mut ga = g.clone();
                    for (gi, ai) in ga.data.iter_mut().zip(&av.data) {
                        if *ai <= 0.0 {
                            *gi = 0.0;
                        }
                    }
                    acc(&mut adj, *a, ga);
                }
                Op::ConcatCols(parts) => {
                    let mut off = 0;
                    for &p in parts {
                        let t = self.value(p);
                        let mut gp = Tensor::zeros(t.rows, t.cols);
                        for r in 0..t.rows {
                            gp.data[r * t.cols..(r + 1) * t.cols]
                                .copy_from_slice(&g.row(r)[off..off + t.cols]);
                        }
                        acc(&mut adj, p, gp);
                        off += t.cols;
                    }
                }
                Op::SumRows(a) => {
                    let t = self.value(*a);
                    let mut ga = Tensor::zeros(t.rows, t.cols);
                    for r in 0..t.rows {
                        ga.data[r * t.cols..(r + 1) * t.cols].copy_from_slice(g.row(0));
                    }
                    acc(&mut adj, *a, ga);
                }
                Op::Exp0(a) => {
                    // y = s(z)·x, z = √c‖x‖: Jᵀg = s·g + c·(s'(z)/z)·(x·g)·x
                    let x = self.value(*a);
                    let r = norm(&x.data);
                    let z = c.sqrt() * r;
                    let s = tanh_over_z(z);
                    let q = dtanh_over_z_over_z(z);
                    let xg = dot(&x.data, &g.data);
                    let mut ga = g.clone();
                    for (gi, xi) in ga.data.iter_mut().zip(&x.data) {
                        *gi = s * *gi + c * q * xg * xi;
                    }
                    acc(&mut adj, *a, ga);
                }
                Op::ClampBall(a) => {
                    let x = self.value(*a);
                    let r = norm(&x.data);
                    let max_r = (1.0 - BALL_EPS) / c.sqrt();
                    if r <= max_r {
                        acc(&mut adj, *a, g.clone());
                    } else {
                        // y = R·x/r: Jᵀg = (R/r)(g − (g·x̂)x̂)
                        let scale = max_r / r;
                        let gx = dot(&g.data, &x.data) / (r * r);
                        let mut ga = g.clone();
                        for (gi, xi) in ga.data.iter_mut().zip(&x.data) {
                            *gi = scale * (*gi - gx * xi);
                        }
                        acc(&mut adj, *a, ga);
                    }
                }
                Op::MobiusAdd(a, b) => {
                    let v = &self.value(*a).data;
                    let w = &self.value(*b).data;
                    let y = &self.nodes[idx].value.data;
                    let s = dot(v, w);
                    let p = dot(v, v);
                    let q = dot(w, w);
                    let big_a = 1.0 + 2.0 * c * s + c * q;
                    let big_b = 1.0 - c * p;
                    let d = 1.0 + 2.0 * c * s + c * c * p * q;
                    let gv_dot = dot(&g.data, v);
                    let gw_dot = dot(&g.data, w);
                    let gy_dot = dot(&g.data, y);
                    let mut ga = Tensor::zeros(1, v.len());
                    let mut gb = Tensor::zeros(1, w.len());
                    for i in 0..v.len() {
                        ga.data[i] = (big_a * g.data[i] + 2.0 * c * gv_dot * w[i]
                            - 2.0 * c * gw_dot * v[i])
                            / d
                            - gy_dot / d * (2.0 * c * w[i] + 2.0 * c * c * q * v[i]);
                        gb.data[i] = (big_b * g.data[i] + 2.0 * c * gv_dot * (v[i] + w[i])) / d
                            - gy_dot / d * (2.0 * c * v[i] + 2.0 * c * c * p * w[i]);
                    }
                    acc(&mut adj, *a, ga);
                    acc(&mut adj, *b, gb);
                }
                Op::HypDist(a, b) => {
                    let x = &self.value(*a).data;
                    let y = &self.value(*b).data;
                    let aa = 1.0 - c * dot(x, x);
                    let bb = 1.0 - c * dot(y, y);
                    let diff2: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - yi) * (xi - yi)).sum();
                    let tm1 = 2.0 * c * diff2 / (aa * bb);
                    if tm1 > 1e-30 {
                        let t = 1.0 + tm1;
                        let w = g.item() / (c.sqrt() * (tm1 * (t + 1.0)).sqrt());
                        let mut ga = Tensor::zeros(1, x.len());
                        let mut gb = Tensor::zeros(1, y.len());
                        for i in 0..x.len() {
                            let dxy = x[i] - y[i];
                            ga.data[i] = w
                                * (4.0 * c / (aa * bb) * dxy
                                    + 4.0 * c * c * diff2 / (aa * aa * bb) * x[i]);
                            gb.data[i] = w
                                * (-4.0 * c / (aa * bb) * dxy
                                    + 4.0 * c * c * diff2 / (aa * bb * bb) * y[i]);
                        }
                        acc(&mut adj, *a, ga);
                        acc(&mut adj, *b, gb);
                    }
                }
                Op::EuclidNorm(a) => {
                    let x = self.value(*a);
                    let r = norm(&x.data);
                    if r > 0.0 {
                        let k = g.item() / r;
                        let mut ga = x.clone();
                        for v in &mut ga.data {
                            *v *= k;
                        }
                        acc(&mut adj, *a, ga);
                    }
                }
                Op::UnitNormalize(a) => {
                    let x = self.value(*a);
                    let r = norm(&x.data);
                    if r > 0.0 {
                        let gx = dot(&g.data, &x.data) / (r * r);
                        let mut ga = g.clone();
                        for (gi, xi) in ga.data.iter_mut().zip(&x.data) {
                            *gi = (*gi - gx * xi) / r;
                        }
                        acc(&mut adj, *a, ga);
                    }
                }
                Op::Softplus(a) => {
                    let av = self.value(*a);
                    let mut ga = g.clone();
                    for (gi, ai) in ga.data.iter_mut().zip(&av.data) {
                        *gi *= sigmoid(*ai);
                    }
                    acc(&mut adj, *a, ga);
                }
                Op::SoftmaxRow(a) => {
                    let y = &self.nodes[idx].value;
                    let gy = dot(&g.data, &y.data);
                    let mut ga = g.clone();
                    for (gi, yi) in ga.data.iter_mut().zip(&y.data) {
                        *gi = yi * (*gi - gy);
                    }
                    acc(&mut adj, *a, ga);
                }
                Op::Sigmoid(a) => {
                    let y = &self.nodes[idx].value;
                    let mut ga = g.clone();
                    for (gi, yi) in ga.data.iter_mut().zip(&y.data) {
                        *gi *= yi * (1.0 - yi);
                    }
                    acc(&mut adj, *a, ga);
                }
                Op::Sub(a, b) => {
                    acc(&mut adj, *a, g.clone());
                    let mut gb = g.clone();
                    for v in &mut gb.data {
                        *v = -*v;
                    }
                    acc(&mut adj, *b, gb);
                }
                Op::AddN(parts) => {
                    for &p in parts {
                        acc(&mut adj, p, g.clone());
                    }
                }
                Op::AffineConst(a, mul) => {
                    let mut ga = g.clone();
                    for v in &mut ga.data {
                        *v *= mul;
                    }
                    acc(&mut adj, *a, ga);
                }
                Op::BceOneHot(p, hot) => {
                    let pv = self.value(*p);
                    let mut gp = Tensor::zeros(1, pv.cols);
                    for (k, &pk) in pv.data.iter().enumerate() {
                        gp.data[k] = if k == *hot {
                            if pk > LOG_CLAMP {
                                -g.item() / pk
                            } else {
                                0.0
                            }
                        } else if 1.0 - pk > LOG_CLAMP {
                            g.item() / (1.0 - pk)
                        } else {
                            0.0
                        };
                    }
                    acc(&mut adj, *p, gp);
                }
                Op::BceBinary(p, y) => {
                    let pk = self.value(*p).item();
                    let mut d = 0.0;
                    if pk > LOG_CLAMP {
                        d -= y / pk;
                    }
                    if 1.0 - pk > LOG_CLAMP {
                        d += (1.0 - y) / (1.0 - pk);
                    }
                    let gp = Tensor::scalar(g.item() * d);
                    acc(&mut adj, *p, gp);
                }
            }
            adj[idx] = Some(g);
        }
        Ok((out, adj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Central finite differences on a const leaf vs the recorded adjoint.
    fn fd_check<F>(build: F, input: Vec<f64>, tol: f64)
    where
        F: Fn(&mut Tape, VarId) -> Result<VarId>,
    {
        let params = ModelParams::zeros(4);
        let h = 1e-5;
        let eval = |data: &[f64]| -> f64 {
            let mut tape = Tape::new(&params, 1.0);
            let x = tape.konst(Tensor::row_vector(data.to_vec())).unwrap();
            let root = build(&mut tape, x).unwrap();
            tape.value(root).item()
        };
        let params2 = ModelParams::zeros(4);
        let mut tape = Tape::new(&params2, 1.0);
        let x = tape.konst(Tensor::row_vector(input.clone())).unwrap();
        let root = build(&mut tape, x).unwrap();
        let (_, adj) = tape.backward(root).unwrap();
        let analytic = adj[x].clone().expect("leaf adjoint");
        for i in 0..input.len() {
            let mut plus = input.clone();
            plus[i] += h;
            let mut minus = input.clone();
            minus[i] -= h;
            let fd = (eval(&plus) - eval(&minus)) / (2.0 * h);
            let a = analytic.data[i];
            let denom = a.abs().max(fd.abs()).max(1e-6);
            assert!(
                ((a - fd) / denom).abs() < tol,
                "coord {i}: analytic {a} vs fd {fd}"
            );
        }
    }

    #[test]
    fn exp0_gradient_matches_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..10 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
            fd_check(
                |t, x| {
                    let e = t.exp0(x)?;
                    let c = t.clamp_ball(e)?;
                    t.euclid_norm(c)
                },
                x,
                1e-4,
            );
        }
    }

    #[test]
    fn mobius_gradient_matches_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for _ in 0..10 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let w: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let w2 = w.clone();
            fd_check(
                move |t, x| {
                    let other = t.konst(Tensor::row_vector(w2.clone()))?;
                    let m = t.mobius_add(x, other)?;
                    t.euclid_norm(m)
                },
                x.clone(),
                1e-4,
            );
            // and with respect to the second argument
            let x2 = x.clone();
            fd_check(
                move |t, w| {
                    let first = t.konst(Tensor::row_vector(x2.clone()))?;
                    let m = t.mobius_add(first, w)?;
                    t.euclid_norm(m)
                },
                w,
                1e-4,
            );
        }
    }

    #[test]
    fn hyp_dist_gradient_matches_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..10 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let y: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let y2 = y.clone();
            fd_check(
                move |t, x| {
                    let other = t.konst(Tensor::row_vector(y2.clone()))?;
                    t.hyp_dist(x, other)
                },
                x,
                1e-4,
            );
        }
    }

    #[test]
    fn dense_chain_gradient_matches_fd() {
        // relu → softplus → softmax → bce over a dense transform
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        for _ in 0..5 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
            fd_check(
                |t, x| {
                    let r = t.softplus(x)?;
                    let s = t.softmax_row(r)?;
                    t.bce_one_hot(s, 1)
                },
                x,
                1e-4,
            );
        }
    }

    #[test]
    fn hinge_gradient_zero_at_exact_zero() {
        let params = ModelParams::zeros(4);
        let mut tape = Tape::new(&params, 1.0);
        let x = tape.konst(Tensor::scalar(0.0)).unwrap();
        let h = tape.hinge(x).unwrap();
        let (_, adj) = tape.backward(h).unwrap();
        assert_eq!(adj[x].as_ref().unwrap().item(), 0.0);
    }

    #[test]
    fn constant_loss_has_zero_param_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = ModelParams::init(4, 1.0, &mut rng);
        let mut tape = Tape::new(&params, 1.0);
        let c = tape.scalar(3.5).unwrap();
        let (grads, _) = tape.backward(c).unwrap();
        for id in grads.ids() {
            assert!(grads.get(id).data.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn param_gradients_accumulate_over_reuse() {
        let mut params = ModelParams::zeros(4);
        params.intf_b = Tensor::scalar(2.0);
        let mut tape = Tape::new(&params, 1.0);
        let b1 = tape.param(ParamId::IntfB).unwrap();
        let b2 = tape.param(ParamId::IntfB).unwrap();
        let s = tape.add_n(vec![b1, b2]).unwrap(); // f = 2b → df/db = 2
        let (grads, _) = tape.backward(s).unwrap();
        assert_eq!(grads.get(ParamId::IntfB).item(), 2.0);
    }

    #[test]
    fn non_finite_value_is_named() {
        let params = ModelParams::zeros(4);
        let mut tape = Tape::new(&params, 1.0);
        let err = tape.konst(Tensor::scalar(f64::NAN)).unwrap_err();
        assert!(err.to_string().contains("const"), "{err}");
    }
}
