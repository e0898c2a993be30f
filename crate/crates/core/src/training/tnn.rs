//! Direct position-to-acceleration baseline network.
//!
//! A plain feed-forward MLP on min-max-normalized inputs and outputs, trained
//! with the quadratic loss on the predicted acceleration components. No
//! potential, no physics: this is the comparison baseline the physics
//! pipeline is measured against, and its characteristic failure (divergence
//! outside the training envelope) is part of the evaluation suite.

use super::{adam_step, AdamState, Dataset, EpochRecord, Hyperparams, PlateauState, TrainError, TrainHistory};
use crate::analytic::{AnalyticError, GravityEval, GravityField};
use crate::network::jet::gelu_derivs;
use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TnnArch {
    pub depth: usize,
    pub width: usize,
    pub seed: u64,
}

impl TnnArch {
    pub fn param_count(&self) -> usize {
        let (d, w) = (self.depth, self.width);
        (3 * w + w) + (d - 1) * (w * w + w) + (3 * w + 3)
    }
}

/// Plain MLP regressor from position to acceleration.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TnnModel {
    pub arch: TnnArch,
    values: Vec<f64>,
    in_lo: [f64; 3],
    in_hi: [f64; 3],
    out_lo: [f64; 3],
    out_hi: [f64; 3],
}

impl TnnModel {
    pub fn init(arch: TnnArch, data: &Dataset) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(arch.seed);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let mut values = vec![0.0; arch.param_count()];
        let w = arch.width;
        let mut offset = 0;
        for (rows, cols) in Self::layer_dims(&arch) {
            let std = (2.0 / cols as f64).sqrt();
            for k in 0..rows * cols {
                values[offset + k] = std * normal.sample(&mut rng);
            }
            offset += rows * cols + rows;
        }
        let _ = w;
        let (in_lo, in_hi) = min_max(&data.positions);
        let (out_lo, out_hi) = min_max(&data.accelerations);
        Self { arch, values, in_lo, in_hi, out_lo, out_hi }
    }

    fn layer_dims(arch: &TnnArch) -> Vec<(usize, usize)> {
        let w = arch.width;
        let mut dims = vec![(w, 3)];
        for _ in 0..arch.depth - 1 {
            dims.push((w, w));
        }
        dims.push((3, w));
        dims
    }

    pub fn param_count(&self) -> usize {
        self.values.len()
    }

    fn normalize_in(&self, x: &Vector3<f64>) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            let span = (self.in_hi[i] - self.in_lo[i]).max(f64::MIN_POSITIVE);
            out[i] = (x[i] - self.in_lo[i]) / span;
        }
        out
    }

    fn normalize_out(&self, a: &Vector3<f64>) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            let span = (self.out_hi[i] - self.out_lo[i]).max(f64::MIN_POSITIVE);
            out[i] = (a[i] - self.out_lo[i]) / span;
        }
        out
    }

    fn denormalize_out(&self, y: &[f64; 3]) -> Vector3<f64> {
        let mut out = Vector3::zeros();
        for i in 0..3 {
            let span = (self.out_hi[i] - self.out_lo[i]).max(f64::MIN_POSITIVE);
            out[i] = self.out_lo[i] + y[i] * span;
        }
        out
    }

    /// Forward pass on normalized inputs, optionally recording activations.
    fn forward_norm(&self, x: &[f64; 3], record: Option<&mut Vec<Vec<f64>>>) -> [f64; 3] {
        let dims = Self::layer_dims(&self.arch);
        let mut acts: Vec<Vec<f64>> = vec![x.to_vec()];
        let mut offset = 0;
        for (li, &(rows, cols)) in dims.iter().enumerate() {
            let input = acts.last().unwrap().clone();
            let weights = &self.values[offset..offset + rows * cols];
            let biases = &self.values[offset + rows * cols..offset + rows * cols + rows];
            offset += rows * cols + rows;
            let mut out = vec![0.0; rows];
            for (j, o) in out.iter_mut().enumerate() {
                let mut acc = biases[j];
                for i in 0..cols {
                    acc += weights[j * cols + i] * input[i];
                }
                *o = if li + 1 == dims.len() { acc } else { gelu_derivs(acc)[0] };
            }
            acts.push(out);
        }
        let last = acts.last().unwrap();
        let result = [last[0], last[1], last[2]];
        if let Some(rec) = record {
            *rec = acts;
        }
        result
    }

    pub fn predict(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let y = self.forward_norm(&self.normalize_in(x), None);
        self.denormalize_out(&y)
    }
}

impl GravityField for TnnModel {
    /// Direct acceleration regressors carry no potential representation; the
    /// potential slot is NaN.
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
        Ok(GravityEval { potential: f64::NAN, acceleration: self.predict(x) })
    }
}

fn min_max(vs: &[Vector3<f64>]) -> ([f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in vs {
        for i in 0..3 {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    (lo, hi)
}

/// Quadratic loss and gradient over a batch (normalized units). Standard
/// first-order backpropagation: this model's loss has no derivative terms.
fn batch_loss_grad(
    model: &TnnModel,
    xs: &[[f64; 3]],
    ys: &[[f64; 3]],
    grad: Option<&mut [f64]>,
) -> f64 {
    let dims = TnnModel::layer_dims(&model.arch);
    let mut total = 0.0;
    let mut g = grad;
    let mut acts: Vec<Vec<f64>> = Vec::new();
    for (x, y) in xs.iter().zip(ys) {
        let out = model.forward_norm(x, Some(&mut acts));
        let resid = [out[0] - y[0], out[1] - y[1], out[2] - y[2]];
        total += resid.iter().map(|r| r * r).sum::<f64>();
        if let Some(grad) = g.as_deref_mut() {
            // reverse pass
            let mut delta: Vec<f64> = resid.iter().map(|r| 2.0 * r / xs.len() as f64).collect();
            let mut offset_end = model.values.len();
            for (li, &(rows, cols)) in dims.iter().enumerate().rev() {
                let offset = offset_end - (rows * cols + rows);
                let weights = &model.values[offset..offset + rows * cols];
                let input = &acts[li];
                // activation derivative (linear on the output layer)
                let pre_delta: Vec<f64> = if li + 1 == dims.len() {
                    delta.clone()
                } else {
                    // recover pre-activation derivative through gelu:
                    // acts[li+1] = gelu(pre); recompute pre from weights
                    let mut pre = vec![0.0; rows];
                    let biases =
                        &model.values[offset + rows * cols..offset + rows * cols + rows];
                    for j in 0..rows {
                        let mut acc = biases[j];
                        for i in 0..cols {
                            acc += weights[j * cols + i] * input[i];
                        }
                        pre[j] = acc;
                    }
                    delta
                        .iter()
                        .zip(&pre)
                        .map(|(d, &p)| d * gelu_derivs(p)[1])
                        .collect()
                };
                let mut next_delta = vec![0.0; cols];
                for j in 0..rows {
                    grad[offset + rows * cols + j] += pre_delta[j];
                    for i in 0..cols {
                        grad[offset + j * cols + i] += pre_delta[j] * input[i];
                        next_delta[i] += weights[j * cols + i] * pre_delta[j];
                    }
                }
                delta = next_delta;
                offset_end = offset;
            }
        }
    }
    total / xs.len() as f64
}

/// Trains the baseline network with the shared Adam/plateau/early-stop loop.
pub fn train_tnn(
    data: &Dataset,
    hp: &Hyperparams,
    arch: TnnArch,
) -> Result<(TnnModel, TrainHistory), TrainError> {
    data.validate()?;
    let mut model = TnnModel::init(arch, data);
    let xs: Vec<[f64; 3]> = data.positions.iter().map(|p| model.normalize_in(p)).collect();
    let ys: Vec<[f64; 3]> =
        data.accelerations.iter().map(|a| model.normalize_out(a)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut indices: Vec<usize> = (0..xs.len()).collect();
    indices.shuffle(&mut rng);
    let val_n = (xs.len() / 10).max(1).min(xs.len().saturating_sub(1));
    let (train_part, val_part) = indices.split_at(xs.len() - val_n);
    let mut train_idx = train_part.to_vec();
    let val_x: Vec<[f64; 3]> = val_part.iter().map(|&i| xs[i]).collect();
    let val_y: Vec<[f64; 3]> = val_part.iter().map(|&i| ys[i]).collect();

    let mut adam = AdamState::new(model.values.len());
    let mut plateau = PlateauState::new(hp);
    let mut grad = vec![0.0; model.values.len()];
    let mut history = TrainHistory::default();
    let mut best = f64::INFINITY;
    let mut best_values = model.values.clone();
    let mut stale = 0usize;
    let start = std::time::Instant::now();

    for epoch in 1..=hp.num_epochs {
        train_idx.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut n_batches = 0;
        for chunk in train_idx.chunks(hp.batch_size.max(1)) {
            let bx: Vec<[f64; 3]> = chunk.iter().map(|&i| xs[i]).collect();
            let by: Vec<[f64; 3]> = chunk.iter().map(|&i| ys[i]).collect();
            grad.fill(0.0);
            let loss = batch_loss_grad(&model, &bx, &by, Some(&mut grad));
            if !loss.is_finite() {
                return Err(TrainError::Diverged { epoch });
            }
            adam_step(&mut model.values, &grad, &mut adam, plateau.lr);
            epoch_loss += loss;
            n_batches += 1;
        }
        let val_loss = batch_loss_grad(&model, &val_x, &val_y, None);
        let lr = plateau.update(val_loss);
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: epoch_loss / n_batches.max(1) as f64,
            val_loss,
            lr,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
        if val_loss < best {
            if val_loss < best * (1.0 - hp.min_delta) {
                stale = 0;
            } else {
                stale += 1;
            }
            best = val_loss;
            best_values = model.values.clone();
        } else {
            stale += 1;
        }
        if stale >= hp.early_stop_patience {
            break;
        }
    }
    model.values = best_values;
    Ok((model, history))
}
