//! Training losses on the full pipeline.
//!
//! Every loss is evaluated in non-dimensional units on the same pipeline the
//! deployed model runs, so the optimized objective is exactly the deployed
//! model's error. The base term is the mean residual norm between the
//! pipeline's acceleration and the label; the percent variant adds the mean
//! relative residual, which keeps high-altitude samples visible next to the
//! much larger low-altitude magnitudes; the Laplacian variant additionally
//! penalizes `|lap U|`, which is zero for any exterior-valid field.

use super::{PinnError, PinnModel};
use crate::network::jet::{Grad3, Jet, Lapl};
use crate::network::Workspace;
use nalgebra::Vector3;
use rayon::prelude::*;

/// Which loss drives training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LossKind {
    /// Mean residual norm.
    Rms,
    /// Mean residual norm plus mean percent residual.
    RmsPct,
    /// The percent loss plus the mean absolute Laplacian.
    RmsPctLapl,
}

/// One non-dimensionalized training sample.
#[derive(Debug, Clone, Copy)]
pub struct NdSample {
    pub x_nd: Vector3<f64>,
    pub a_nd: Vector3<f64>,
}

impl NdSample {
    pub fn from_dimensional(
        x: &Vector3<f64>,
        a: &Vector3<f64>,
        constants: &super::NonDimConstants,
    ) -> Self {
        Self { x_nd: x / constants.x_star, a_nd: a / constants.a_star }
    }
}

const CHUNK: usize = 128;

/// Batch loss without gradients.
pub fn loss_value(
    model: &PinnModel,
    batch: &[NdSample],
    kind: LossKind,
) -> Result<f64, PinnError> {
    match kind {
        LossKind::Rms => run::<Grad3>(model, batch, false, None),
        LossKind::RmsPct => run::<Grad3>(model, batch, true, None),
        LossKind::RmsPctLapl => run::<Lapl>(model, batch, true, None),
    }
}

/// Batch loss and its exact gradient with respect to every parameter
/// (reverse-over-forward through the whole pipeline). `grad` must be
/// parameter-sized; it is overwritten.
pub fn loss_and_grad(
    model: &PinnModel,
    batch: &[NdSample],
    kind: LossKind,
    grad: &mut [f64],
) -> Result<f64, PinnError> {
    assert_eq!(grad.len(), model.params.len());
    match kind {
        LossKind::Rms => run::<Grad3>(model, batch, false, Some(grad)),
        LossKind::RmsPct => run::<Grad3>(model, batch, true, Some(grad)),
        LossKind::RmsPctLapl => run::<Lapl>(model, batch, true, Some(grad)),
    }
}

fn run<J: Jet + Send + Sync>(
    model: &PinnModel,
    batch: &[NdSample],
    pct: bool,
    grad: Option<&mut [f64]>,
) -> Result<f64, PinnError> {
    if batch.is_empty() {
        return Err(PinnError::EmptyBatch);
    }
    let want_grad = grad.is_some();
    let n_params = model.params.len();

    // fixed-size chunks folded in order keep the reduction deterministic
    // under any thread schedule
    let partials: Result<Vec<(f64, Vec<f64>, usize)>, PinnError> = batch
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut ws = Workspace::<J>::new(model.params.arch());
            let mut g = vec![0.0; if want_grad { n_params } else { 0 }];
            let mut sum = 0.0;
            for (si, sample) in chunk.iter().enumerate() {
                let index = ci * CHUNK + si;
                let trace = model.forward_trace_nd::<J>(&sample.x_nd, &mut ws)?;
                let out = trace.u_hat;
                let residual = Vector3::new(
                    out.comp(1) - sample.a_nd.x,
                    out.comp(2) - sample.a_nd.y,
                    out.comp(3) - sample.a_nd.z,
                );
                let rnorm = residual.norm();
                let anorm = sample.a_nd.norm();
                let mut term = rnorm;
                if pct {
                    if anorm == 0.0 {
                        return Err(PinnError::DegenerateLabel { index });
                    }
                    term += rnorm / anorm;
                }
                let lap = if J::COMPONENTS == 7 {
                    out.comp(4) + out.comp(5) + out.comp(6)
                } else {
                    0.0
                };
                if J::COMPONENTS == 7 {
                    term += lap.abs();
                }
                if !term.is_finite() {
                    return Err(PinnError::NonFiniteLoss { index });
                }
                sum += term;

                if want_grad {
                    let mut seed = J::zero();
                    if rnorm > 0.0 {
                        let w = 1.0 + if pct { 1.0 / anorm } else { 0.0 };
                        for i in 0..3 {
                            *seed.comp_mut(1 + i) = w * residual[i] / rnorm;
                        }
                    }
                    if J::COMPONENTS == 7 && lap != 0.0 {
                        for i in 4..7 {
                            *seed.comp_mut(i) = lap.signum();
                        }
                    }
                    model.backward_from_trace(&trace, &mut ws, seed, &mut g);
                }
            }
            Ok((sum, g, chunk.len()))
        })
        .collect();

    let partials = partials?;
    let n = batch.len() as f64;
    let mut total = 0.0;
    if let Some(grad) = grad {
        grad.fill(0.0);
        for (sum, g, _) in &partials {
            total += sum;
            for (acc, v) in grad.iter_mut().zip(g) {
                *acc += v;
            }
        }
        for v in grad.iter_mut() {
            *v /= n;
        }
    } else {
        for (sum, _, _) in &partials {
            total += sum;
        }
    }
    Ok(total / n)
}

/// Mean percent acceleration error of the model against labels, the
/// validation metric reported during training.
pub fn mean_percent_error(model: &PinnModel, batch: &[NdSample]) -> Result<f64, PinnError> {
    if batch.is_empty() {
        return Err(PinnError::EmptyBatch);
    }
    let sums: Result<Vec<f64>, PinnError> = batch
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut ws = Workspace::<Grad3>::new(model.params.arch());
            let mut sum = 0.0;
            for sample in chunk {
                let trace = model.forward_trace_nd::<Grad3>(&sample.x_nd, &mut ws)?;
                let out = trace.u_hat;
                let residual = Vector3::new(
                    out.comp(1) - sample.a_nd.x,
                    out.comp(2) - sample.a_nd.y,
                    out.comp(3) - sample.a_nd.z,
                );
                sum += 100.0 * residual.norm() / sample.a_nd.norm();
            }
            Ok(sum)
        })
        .collect();
    Ok(sums?.iter().sum::<f64>() / batch.len() as f64)
}
