//! The gated multilayer perceptron behind the learned gravity models, with
//! the exact differentiation machinery its training requires.
//!
//! Architecture: two embedding encoders `U` and `V` map the feature vector to
//! the hidden width, a first dense layer does the same, and each subsequent
//! hidden layer produces a gate `Z` that mixes the two embeddings,
//! `H_{k+1} = (1 - Z_k) .* U + Z_k .* V`. All of those layers use GELU; the
//! output layer is linear. Two extra trainable scalars ride at the end of the
//! parameter vector: the blending sharpness and reference radius consumed by
//! the potential pipeline. The parameter count is
//! `3 (f w + w) + (d - 1)(w^2 + w) + (w + 1) + 2`,
//! which reproduces the published sizes (227 at depth 2 / width 8 with five
//! features, 30,339 at depth 8 / width 64).
//!
//! Differentiation: evaluation runs on [`jet::Jet`] values, so position
//! derivatives come out of forward mode exactly. Parameter gradients of
//! losses that consume those derivatives run the recorded jet computation
//! backwards (reverse over forward) - see [`backward`].

pub mod jet;

use jet::{gelu, gelu_derivs, Jet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("non-finite output at layer {layer}")]
    NonFinite { layer: usize },
    #[error("parameter vector length {got} does not match architecture ({want})")]
    BadParameterLength { got: usize, want: usize },
}

/// Network shape descriptor; `depth` counts hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Architecture {
    pub depth: usize,
    pub width: usize,
    pub feature_dim: usize,
    pub seed: u64,
}

impl Architecture {
    pub fn new(depth: usize, width: usize, feature_dim: usize, seed: u64) -> Self {
        assert!(depth >= 1 && width >= 1 && feature_dim >= 1);
        Self { depth, width, feature_dim, seed }
    }

    /// Total number of trainable parameters, including the two pipeline
    /// scalars.
    pub fn param_count(&self) -> usize {
        let (d, w, f) = (self.depth, self.width, self.feature_dim);
        3 * (f * w + w) + (d - 1) * (w * w + w) + (w + 1) + 2
    }
}

/// Offsets of each block in the flat parameter vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    enc_u: usize,
    enc_v: usize,
    first: usize,
    gates: usize,
    out: usize,
    blend: usize,
}

impl Layout {
    fn new(arch: &Architecture) -> Self {
        let (w, f) = (arch.width, arch.feature_dim);
        let dense_in = f * w + w;
        let dense_hidden = w * w + w;
        let enc_u = 0;
        let enc_v = enc_u + dense_in;
        let first = enc_v + dense_in;
        let gates = first + dense_in;
        let out = gates + (arch.depth - 1) * dense_hidden;
        let blend = out + w + 1;
        Self { enc_u, enc_v, first, gates, out, blend }
    }
}

/// Trainable parameters: flat 64-bit values plus the architecture header.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MlpParams {
    arch: Architecture,
    values: Vec<f64>,
}

impl MlpParams {
    /// Deterministic-by-seed initialization: variance-preserving normal
    /// weights (std `sqrt(2 / fan_in)`), zero biases, unit blend scalars.
    pub fn init(arch: Architecture) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(arch.seed);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let mut values = vec![0.0; arch.param_count()];
        let layout = Layout::new(&arch);
        let (w, f) = (arch.width, arch.feature_dim);
        {
            let mut fill = |offset: usize, rows: usize, cols: usize, values: &mut Vec<f64>| {
                let std = (2.0 / cols as f64).sqrt();
                for k in 0..rows * cols {
                    values[offset + k] = std * normal.sample(&mut rng);
                }
            };
            fill(layout.enc_u, w, f, &mut values);
            fill(layout.enc_v, w, f, &mut values);
            fill(layout.first, w, f, &mut values);
            for g in 0..arch.depth - 1 {
                fill(layout.gates + g * (w * w + w), w, w, &mut values);
            }
            fill(layout.out, 1, w, &mut values);
        }
        values[layout.blend] = 1.0;
        values[layout.blend + 1] = 1.0;
        Self { arch, values }
    }

    pub fn from_values(arch: Architecture, values: Vec<f64>) -> Result<Self, NetworkError> {
        if values.len() != arch.param_count() {
            return Err(NetworkError::BadParameterLength {
                got: values.len(),
                want: arch.param_count(),
            });
        }
        Ok(Self { arch, values })
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Zeroes every weight and bias but leaves the blend scalars alone, so
    /// the network contributes exactly nothing to the potential pipeline.
    pub fn zero_network_weights(&mut self) {
        let blend = Layout::new(&self.arch).blend;
        for v in &mut self.values[..blend] {
            *v = 0.0;
        }
    }

    /// Trainable blending sharpness (second-to-last parameter).
    pub fn blend_k(&self) -> f64 {
        self.values[self.values.len() - 2]
    }

    /// Trainable blending reference radius (last parameter).
    pub fn blend_r_ref(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn set_blend(&mut self, k: f64, r_ref: f64) {
        let n = self.values.len();
        self.values[n - 2] = k;
        self.values[n - 1] = r_ref;
    }

    /// Indices of the two blend scalars in the flat vector.
    pub fn blend_indices(&self) -> (usize, usize) {
        (self.values.len() - 2, self.values.len() - 1)
    }
}

/// Forward/backward scratch: every intermediate jet of one evaluation.
#[derive(Debug, Clone)]
pub struct Workspace<J: Jet> {
    x: Vec<J>,
    u_pre: Vec<J>,
    u: Vec<J>,
    v_pre: Vec<J>,
    v: Vec<J>,
    vmu: Vec<J>,
    first_pre: Vec<J>,
    h: Vec<Vec<J>>,
    z_pre: Vec<Vec<J>>,
    z: Vec<Vec<J>>,
    // adjoint buffers, zeroed per backward pass
    adj_u: Vec<J>,
    adj_v: Vec<J>,
    adj_vmu: Vec<J>,
    adj_h: Vec<Vec<J>>,
    adj_pre: Vec<J>,
}

impl<J: Jet> Workspace<J> {
    pub fn new(arch: &Architecture) -> Self {
        let (d, w, f) = (arch.depth, arch.width, arch.feature_dim);
        let z = J::zero();
        Self {
            x: vec![z; f],
            u_pre: vec![z; w],
            u: vec![z; w],
            v_pre: vec![z; w],
            v: vec![z; w],
            vmu: vec![z; w],
            first_pre: vec![z; w],
            h: vec![vec![z; w]; d],
            z_pre: vec![vec![z; w]; d - 1],
            z: vec![vec![z; w]; d - 1],
            adj_u: vec![z; w],
            adj_v: vec![z; w],
            adj_vmu: vec![z; w],
            adj_h: vec![vec![z; w]; d],
            adj_pre: vec![z; w],
        }
    }
}

fn affine<J: Jet>(weights: &[f64], biases: &[f64], input: &[J], output: &mut [J]) {
    let cols = input.len();
    for (j, out) in output.iter_mut().enumerate() {
        let mut acc = J::constant(biases[j]);
        let row = &weights[j * cols..(j + 1) * cols];
        for (w, x) in row.iter().zip(input) {
            acc = acc + x.scale(*w);
        }
        *out = acc;
    }
}

fn affine_adj<J: Jet>(
    weights: &[f64],
    input: &[J],
    out_adj: &[J],
    w_grad: &mut [f64],
    b_grad: &mut [f64],
    in_adj: &mut [J],
) {
    let cols = input.len();
    for (j, oa) in out_adj.iter().enumerate() {
        b_grad[j] += oa.comp(0);
        let row = &weights[j * cols..(j + 1) * cols];
        let grow = &mut w_grad[j * cols..(j + 1) * cols];
        for i in 0..cols {
            let mut dot = 0.0;
            for c in 0..J::COMPONENTS {
                dot += oa.comp(c) * input[i].comp(c);
            }
            grow[i] += dot;
            in_adj[i] = in_adj[i] + oa.scale(row[i]);
        }
    }
}

/// Runs the network on jet features, recording intermediates for a later
/// backward sweep. Returns the scalar output jet.
pub fn forward_recorded<J: Jet>(
    params: &MlpParams,
    features: &[J],
    ws: &mut Workspace<J>,
) -> Result<J, NetworkError> {
    let arch = params.arch;
    assert_eq!(features.len(), arch.feature_dim);
    let layout = Layout::new(&arch);
    let p = &params.values;
    let (w, f) = (arch.width, arch.feature_dim);
    ws.x.copy_from_slice(features);

    affine(&p[layout.enc_u..], &p[layout.enc_u + f * w..], features, &mut ws.u_pre);
    affine(&p[layout.enc_v..], &p[layout.enc_v + f * w..], features, &mut ws.v_pre);
    affine(&p[layout.first..], &p[layout.first + f * w..], features, &mut ws.first_pre);
    for j in 0..w {
        ws.u[j] = gelu(ws.u_pre[j]);
        ws.v[j] = gelu(ws.v_pre[j]);
        ws.vmu[j] = ws.v[j] - ws.u[j];
        ws.h[0][j] = gelu(ws.first_pre[j]);
    }

    for g in 0..arch.depth - 1 {
        let base = layout.gates + g * (w * w + w);
        let (head, tail) = ws.h.split_at_mut(g + 1);
        let h_g = &head[g];
        affine(&p[base..], &p[base + w * w..], h_g, &mut ws.z_pre[g]);
        for (j, out) in tail[0].iter_mut().enumerate() {
            ws.z[g][j] = gelu(ws.z_pre[g][j]);
            *out = ws.u[j] + ws.z[g][j] * ws.vmu[j];
        }
    }

    let h_last = &ws.h[arch.depth - 1];
    let mut out = J::constant(p[layout.out + w]);
    for j in 0..w {
        out = out + h_last[j].scale(p[layout.out + j]);
    }
    if !out.value().is_finite() {
        return Err(NetworkError::NonFinite { layer: arch.depth });
    }
    Ok(out)
}

/// Plain value evaluation.
pub fn forward(params: &MlpParams, features: &[f64]) -> Result<f64, NetworkError> {
    let jets: Vec<jet::Val> = features.iter().map(|&v| jet::Val([v])).collect();
    let mut ws = Workspace::new(&params.arch);
    Ok(forward_recorded(params, &jets, &mut ws)?.value())
}

/// Value and position gradient through a supplied feature Jacobian.
///
/// The features are seeded with the Jacobian rows as tangents, so the output
/// jet directly carries `(d out / d features) . jac`, exact forward-mode.
pub fn value_and_input_grad(
    params: &MlpParams,
    features: &[f64],
    jac: &[[f64; 3]],
) -> Result<(f64, [f64; 3]), NetworkError> {
    assert_eq!(features.len(), jac.len());
    let jets: Vec<jet::Grad3> = features
        .iter()
        .zip(jac)
        .map(|(&v, row)| jet::Grad3([v, row[0], row[1], row[2]]))
        .collect();
    let mut ws = Workspace::new(&params.arch);
    let out = forward_recorded(params, &jets, &mut ws)?;
    Ok((out.value(), [out.comp(1), out.comp(2), out.comp(3)]))
}

/// Reverse sweep over a recorded forward pass.
///
/// `out_adj` is the adjoint of the output jet (one slot per jet component,
/// i.e. the derivative of the loss with respect to the output value and each
/// of its carried derivatives). Parameter gradients accumulate into `grad`
/// (same layout as the parameter vector, blend scalars untouched); feature
/// adjoints accumulate into `feat_adj`.
pub fn backward<J: Jet>(
    params: &MlpParams,
    ws: &mut Workspace<J>,
    out_adj: J,
    grad: &mut [f64],
    feat_adj: &mut [J],
) {
    let arch = params.arch;
    let layout = Layout::new(&arch);
    let p = &params.values;
    let (w, f, d) = (arch.width, arch.feature_dim, arch.depth);

    for a in ws.adj_u.iter_mut() {
        *a = J::zero();
    }
    for a in ws.adj_v.iter_mut() {
        *a = J::zero();
    }
    for a in ws.adj_vmu.iter_mut() {
        *a = J::zero();
    }
    for row in ws.adj_h.iter_mut() {
        for a in row.iter_mut() {
            *a = J::zero();
        }
    }

    // output layer
    let h_last = &ws.h[d - 1];
    grad[layout.out + w] += out_adj.comp(0);
    for j in 0..w {
        let mut dot = 0.0;
        for c in 0..J::COMPONENTS {
            dot += out_adj.comp(c) * h_last[j].comp(c);
        }
        grad[layout.out + j] += dot;
        ws.adj_h[d - 1][j] = ws.adj_h[d - 1][j] + out_adj.scale(p[layout.out + j]);
    }

    // gated layers, reversed: h_{g+1} = u + z * (v - u)
    for g in (0..d - 1).rev() {
        let base = layout.gates + g * (w * w + w);
        for j in 0..w {
            let h_adj = ws.adj_h[g + 1][j];
            ws.adj_u[j] = ws.adj_u[j] + h_adj;
            let mut z_adj = J::zero();
            let mut vmu_adj = J::zero();
            J::mul_adj(ws.z[g][j], ws.vmu[j], h_adj, &mut z_adj, &mut vmu_adj);
            ws.adj_vmu[j] = ws.adj_vmu[j] + vmu_adj;
            let mut pre_adj = J::zero();
            J::lift_adj(ws.z_pre[g][j], &gelu_derivs(ws.z_pre[g][j].value()), z_adj, &mut pre_adj);
            ws.adj_pre[j] = pre_adj;
        }
        let (wg, bg) = grad[base..base + w * w + w].split_at_mut(w * w);
        let (h_head, _) = ws.adj_h.split_at_mut(g + 1);
        affine_adj(&p[base..base + w * w], &ws.h[g], &ws.adj_pre, wg, bg, &mut h_head[g]);
    }

    // v - u split
    for j in 0..w {
        ws.adj_v[j] = ws.adj_v[j] + ws.adj_vmu[j];
        ws.adj_u[j] = ws.adj_u[j] - ws.adj_vmu[j];
    }

    // first layer
    for j in 0..w {
        let mut pre_adj = J::zero();
        J::lift_adj(
            ws.first_pre[j],
            &gelu_derivs(ws.first_pre[j].value()),
            ws.adj_h[0][j],
            &mut pre_adj,
        );
        ws.adj_pre[j] = pre_adj;
    }
    let (wf_, bf_) = grad[layout.first..layout.first + f * w + w].split_at_mut(f * w);
    affine_adj(&p[layout.first..layout.first + f * w], &ws.x, &ws.adj_pre, wf_, bf_, feat_adj);

    // encoders
    for (which, off) in [(0usize, layout.enc_u), (1usize, layout.enc_v)] {
        for j in 0..w {
            let (pre, act_adj) = if which == 0 {
                (ws.u_pre[j], ws.adj_u[j])
            } else {
                (ws.v_pre[j], ws.adj_v[j])
            };
            let mut pre_adj = J::zero();
            J::lift_adj(pre, &gelu_derivs(pre.value()), act_adj, &mut pre_adj);
            ws.adj_pre[j] = pre_adj;
        }
        let (we, be) = grad[off..off + f * w + w].split_at_mut(f * w);
        affine_adj(&p[off..off + f * w], &ws.x, &ws.adj_pre, we, be, feat_adj);
    }
}
