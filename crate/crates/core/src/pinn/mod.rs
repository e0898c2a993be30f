//! The physics-informed gravity model pipeline.
//!
//! One evaluation runs: non-dimensionalize the field point, build bounded
//! radial features, propagate the network to a proxy potential, unscale the
//! proxy, optionally superpose a down-weighted low-fidelity analytic
//! potential, blend toward the analytic boundary model with a smooth
//! transition weight, and re-dimensionalize. The acceleration is the exact
//! position gradient of that whole composition, taken by running the same
//! code on derivative-carrying jets; nothing is finite-differenced and there
//! are no separate training-time branches.
//!
//! Non-dimensional units are used for every internal quantity: positions are
//! in body radii and potentials in units of `u_star`, so the blending and
//! fusion radii are radii in units of `R`.

pub mod bundle;
pub mod lf;
pub mod loss;

use crate::network::jet::{recip, sqrt, tanh, tanh_derivs, Grad3, Jet, Lapl, Val};
use crate::network::{self, MlpParams, NetworkError, Workspace};
use nalgebra::Vector3;
use thiserror::Error;

pub use lf::LfModel;
pub use loss::{LossKind, NdSample};

#[derive(Debug, Error)]
pub enum PinnError {
    #[error("field point at the origin")]
    Singularity,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("u_star = {u_star:e} is not positive; the low-fidelity model meets or exceeds the data everywhere - recompute the constants without it in the max")]
    NonPositiveUStar { u_star: f64 },
    #[error("network feature dim {network} does not match the feature map ({expected})")]
    FeatureDimMismatch { network: usize, expected: usize },
    #[error("acceleration label {index} has zero magnitude")]
    DegenerateLabel { index: usize },
    #[error("non-finite loss at sample {index}")]
    NonFiniteLoss { index: usize },
    #[error("batch is empty")]
    EmptyBatch,
}

/// Characteristic scales tying the non-dimensional pipeline to physical
/// units: `t_star = sqrt(x_star^2 / u_star)` and `a_star = x_star / t_star^2
/// = u_star / x_star`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NonDimConstants {
    pub x_star: f64,
    pub u_star: f64,
    pub t_star: f64,
    pub a_star: f64,
}

impl NonDimConstants {
    pub fn new(x_star: f64, u_star: f64) -> Self {
        assert!(x_star > 0.0 && u_star > 0.0);
        let t_star = (x_star * x_star / u_star).sqrt();
        Self { x_star, u_star, t_star, a_star: x_star / (t_star * t_star) }
    }
}

/// Picks `x_star = R` and `u_star` as the largest gap between the data's
/// potential labels and the low-fidelity potential. Falls back to `mu / R`
/// when no potential labels exist.
pub fn compute_constants(
    positions: &[Vector3<f64>],
    potentials: Option<&[f64]>,
    mu: f64,
    radius: f64,
    lf: Option<&LfModel>,
) -> Result<NonDimConstants, PinnError> {
    let u_star = match potentials {
        None => mu / radius,
        Some(pots) => {
            assert_eq!(pots.len(), positions.len());
            let mut best = f64::NEG_INFINITY;
            for (x, &u) in positions.iter().zip(pots) {
                let u_lf = match lf {
                    None => 0.0,
                    Some(model) => {
                        let xs =
                            [Val::constant(x.x), Val::constant(x.y), Val::constant(x.z)];
                        model.potential(&xs, Val::constant(x.norm())).value()
                    }
                };
                best = best.max(u - u_lf);
            }
            best
        }
    };
    if u_star.is_nan() || u_star <= 1e-12 * mu / radius {
        return Err(PinnError::NonPositiveUStar { u_star });
    }
    Ok(NonDimConstants::new(radius, u_star))
}

/// Bounded network inputs at one non-dimensional field point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// min(r, 1): the interior radius proxy.
    pub r_i: f64,
    /// min(1, 1/r): the exterior radius proxy.
    pub r_e: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

/// Boundary blending configuration. The radius and sharpness seed the two
/// trainable scalars at the tail of the parameter vector; with `trainable`
/// off they stay frozen at these values.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundaryConfig {
    /// Non-dimensional reference radius, typically the training band ceiling.
    pub r_ref: f64,
    /// Transition sharpness; 2 is the recommended default.
    pub k: f64,
    pub trainable: bool,
}

impl BoundaryConfig {
    pub fn new(r_ref: f64, k: f64) -> Self {
        assert!(k > 0.0 && r_ref >= 1.0);
        Self { r_ref, k, trainable: true }
    }

    pub fn frozen(r_ref: f64, k: f64) -> Self {
        Self { trainable: false, ..Self::new(r_ref, k) }
    }
}

/// Low-fidelity fusion configuration. `lf` doubles as the boundary model:
/// with fusion disabled the blend target is the undamped `lf` potential.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FusionConfig {
    pub enabled: bool,
    /// Non-dimensional radius where the low-fidelity weight crosses 1/2;
    /// `1 + e` when built from body properties.
    pub r_star: f64,
    /// Sharpness of the low-fidelity weight (0.5 by default).
    pub k_star: f64,
    pub lf: LfModel,
}

impl FusionConfig {
    pub fn small_body(eccentricity: f64, lf: LfModel) -> Self {
        Self { enabled: true, r_star: 1.0 + eccentricity, k_star: 0.5, lf }
    }

    pub fn disabled(lf: LfModel) -> Self {
        Self { enabled: false, r_star: 1.0, k_star: 0.5, lf }
    }
}

/// Which pipeline stages are active; the staged experiment protocol switches
/// these one at a time, deployment keeps them all on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PinnVariant {
    /// Bounded 5D radial features instead of raw Cartesian inputs.
    pub pines_features: bool,
    /// Learn the proxy potential and divide by n(r) afterwards.
    pub proxy_potential: bool,
    /// Blend into the analytic boundary model with the smooth weight.
    pub boundary_blend: bool,
}

impl PinnVariant {
    pub fn full() -> Self {
        Self { pines_features: true, proxy_potential: true, boundary_blend: true }
    }

    pub fn feature_dim(&self) -> usize {
        if self.pines_features {
            5
        } else {
            3
        }
    }
}

/// The deployable learned gravity model.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PinnModel {
    pub params: MlpParams,
    pub constants: NonDimConstants,
    pub boundary: BoundaryConfig,
    pub fusion: FusionConfig,
    pub variant: PinnVariant,
}

impl PinnModel {
    pub fn new(
        params: MlpParams,
        constants: NonDimConstants,
        boundary: BoundaryConfig,
        fusion: FusionConfig,
        variant: PinnVariant,
    ) -> Result<Self, PinnError> {
        if params.arch().feature_dim != variant.feature_dim() {
            return Err(PinnError::FeatureDimMismatch {
                network: params.arch().feature_dim,
                expected: variant.feature_dim(),
            });
        }
        let mut params = params;
        params.set_blend(boundary.k, boundary.r_ref);
        Ok(Self { params, constants, boundary, fusion, variant })
    }

    /// Effective blend parameters (trained values when trainable).
    pub fn blend(&self) -> (f64, f64) {
        (self.params.blend_k(), self.params.blend_r_ref())
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Potential at a dimensional field point.
    pub fn potential(&self, x: &Vector3<f64>) -> Result<f64, PinnError> {
        let trace = self.forward_trace::<Val>(x, &mut Workspace::new(self.params.arch()))?;
        Ok(trace.u_hat.value() * self.constants.u_star)
    }

    /// Attraction at a dimensional field point: the exact gradient of
    /// [`Self::potential`] through every pipeline stage.
    pub fn acceleration(&self, x: &Vector3<f64>) -> Result<Vector3<f64>, PinnError> {
        Ok(self.eval_both(x)?.1)
    }

    /// Potential and acceleration from one first-order jet pass.
    pub fn eval_both(&self, x: &Vector3<f64>) -> Result<(f64, Vector3<f64>), PinnError> {
        let trace = self.forward_trace::<Grad3>(x, &mut Workspace::new(self.params.arch()))?;
        let c = &self.constants;
        Ok((
            trace.u_hat.value() * c.u_star,
            Vector3::new(trace.u_hat.comp(1), trace.u_hat.comp(2), trace.u_hat.comp(3))
                * c.a_star,
        ))
    }

    /// Trace of the Hessian of the dimensional potential, from three nested
    /// forward-mode directional second derivatives in one pass.
    pub fn laplacian(&self, x: &Vector3<f64>) -> Result<f64, PinnError> {
        let trace = self.forward_trace::<Lapl>(x, &mut Workspace::new(self.params.arch()))?;
        let c = &self.constants;
        Ok((trace.u_hat.comp(4) + trace.u_hat.comp(5) + trace.u_hat.comp(6)) * c.u_star
            / (c.x_star * c.x_star))
    }

    /// Pipeline forward pass on jets at a dimensional point.
    pub(crate) fn forward_trace<J: Jet>(
        &self,
        x: &Vector3<f64>,
        ws: &mut Workspace<J>,
    ) -> Result<Trace<J>, PinnError> {
        let xs = self.constants.x_star;
        self.forward_trace_nd(&(x / xs), ws)
    }

    /// Pipeline forward pass on jets at a non-dimensional point; derivative
    /// components are with respect to the non-dimensional coordinates.
    pub(crate) fn forward_trace_nd<J: Jet>(
        &self,
        x_nd: &Vector3<f64>,
        ws: &mut Workspace<J>,
    ) -> Result<Trace<J>, PinnError> {
        if x_nd.norm() == 0.0 {
            return Err(PinnError::Singularity);
        }
        let xj = [
            J::variable(x_nd.x, 0),
            J::variable(x_nd.y, 1),
            J::variable(x_nd.z, 2),
        ];
        let r = sqrt(xj[0] * xj[0] + xj[1] * xj[1] + xj[2] * xj[2]);

        let feats: Vec<J> = if self.variant.pines_features {
            let inv_r = recip(r);
            // one-sided convention at the seam: r = 1 takes the exterior branch
            let (r_i, r_e) = if r.value() < 1.0 {
                (r, J::constant(1.0))
            } else {
                (J::constant(1.0), inv_r)
            };
            vec![r_i, r_e, xj[0] * inv_r, xj[1] * inv_r, xj[2] * inv_r]
        } else {
            xj.to_vec()
        };

        let u_nn = network::forward_recorded(&self.params, &feats, ws)?;

        // proxy unscaling: divide by n(r) = max(r, 1), exterior branch at r = 1
        let (inv_n, u_hat_nn) = if self.variant.proxy_potential && r.value() >= 1.0 {
            let inv = recip(r);
            (Some(inv), u_nn * inv)
        } else {
            (None, u_nn)
        };

        // low-fidelity / boundary potential, non-dimensionalized
        let lf_nd = {
            let xs = self.constants.x_star;
            let x_dim = [xj[0].scale(xs), xj[1].scale(xs), xj[2].scale(xs)];
            self.fusion
                .lf
                .potential(&x_dim, r.scale(xs))
                .scale(1.0 / self.constants.u_star)
        };

        let mut blend = None;
        let u_hat = match (self.fusion.enabled, self.variant.boundary_blend) {
            (true, true) => {
                // w_nn (u_lf_w + u_hat_nn) + w_bc u_lf_w collapses to
                // u_lf_w + (1 - h) u_hat_nn
                let w_lf = transition_jet(r, self.fusion.k_star, self.fusion.r_star);
                let u_lf_w = w_lf * lf_nd;
                let (arg, h) = blend_weight(r, &self.params);
                let one_minus_h = J::constant(1.0) - h;
                blend = Some(BlendTrace { arg, h, u_target: u_lf_w });
                u_lf_w + one_minus_h * u_hat_nn
            }
            (true, false) => {
                let w_lf = transition_jet(r, self.fusion.k_star, self.fusion.r_star);
                w_lf * lf_nd + u_hat_nn
            }
            (false, true) => {
                let (arg, h) = blend_weight(r, &self.params);
                let one_minus_h = J::constant(1.0) - h;
                blend = Some(BlendTrace { arg, h, u_target: lf_nd });
                one_minus_h * u_hat_nn + h * lf_nd
            }
            (false, false) => u_hat_nn,
        };

        Ok(Trace { r, u_nn, inv_n, u_hat_nn, blend, u_hat, fused: self.fusion.enabled })
    }

    /// Reverse sweep of the pipeline for parameter gradients.
    ///
    /// `u_hat_adj` is the adjoint of the non-dimensional output jet. Feature
    /// values depend only on position, so parameter gradients flow through
    /// exactly two channels: the network output and, when blending is
    /// trainable, the two blend scalars.
    pub(crate) fn backward_from_trace<J: Jet>(
        &self,
        trace: &Trace<J>,
        ws: &mut Workspace<J>,
        u_hat_adj: J,
        grad: &mut [f64],
    ) {
        let mut u_hat_nn_adj = J::zero();
        let mut h_adj = J::zero();

        match (&trace.blend, trace.fused) {
            (Some(b), true) => {
                // u_hat = u_target + (1 - h) * u_hat_nn
                let one_minus_h = J::constant(1.0) - b.h;
                let mut omh_adj = J::zero();
                J::mul_adj(
                    one_minus_h,
                    trace.u_hat_nn,
                    u_hat_adj,
                    &mut omh_adj,
                    &mut u_hat_nn_adj,
                );
                h_adj = h_adj - omh_adj;
            }
            (Some(b), false) => {
                // u_hat = (1 - h) * u_hat_nn + h * u_target
                let one_minus_h = J::constant(1.0) - b.h;
                let mut omh_adj = J::zero();
                J::mul_adj(
                    one_minus_h,
                    trace.u_hat_nn,
                    u_hat_adj,
                    &mut omh_adj,
                    &mut u_hat_nn_adj,
                );
                h_adj = h_adj - omh_adj;
                let mut target_adj = J::zero();
                J::mul_adj(b.h, b.u_target, u_hat_adj, &mut h_adj, &mut target_adj);
            }
            (None, _) => u_hat_nn_adj = u_hat_adj,
        }

        // blend scalars
        if let Some(b) = &trace.blend {
            if self.boundary.trainable {
                // h = (1 + tanh(arg))/2, arg = k (r - r_ref)
                let th_adj = h_adj.scale(0.5);
                let mut arg_adj = J::zero();
                J::lift_adj(b.arg, &tanh_derivs(b.arg.value()), th_adj, &mut arg_adj);
                let k = J::constant(self.params.blend_k());
                let r_minus = trace.r - J::constant(self.params.blend_r_ref());
                let mut k_adj = J::zero();
                let mut rm_adj = J::zero();
                J::mul_adj(k, r_minus, arg_adj, &mut k_adj, &mut rm_adj);
                let (ik, ir) = self.params.blend_indices();
                grad[ik] += k_adj.comp(0);
                grad[ir] -= rm_adj.comp(0);
            }
        }

        // proxy unscaling
        let u_nn_adj = match trace.inv_n {
            Some(inv) => {
                let mut a = J::zero();
                let mut inv_adj = J::zero();
                J::mul_adj(trace.u_nn, inv, u_hat_nn_adj, &mut a, &mut inv_adj);
                a
            }
            None => u_hat_nn_adj,
        };

        let mut feat_adj = vec![J::zero(); self.variant.feature_dim()];
        network::backward(&self.params, ws, u_nn_adj, grad, &mut feat_adj);
    }
}

impl crate::analytic::GravityField for PinnModel {
    fn eval(
        &self,
        x: &Vector3<f64>,
    ) -> Result<crate::analytic::GravityEval, crate::analytic::AnalyticError> {
        let (potential, acceleration) = self
            .eval_both(x)
            .map_err(|_| crate::analytic::AnalyticError::Singularity { x: *x })?;
        Ok(crate::analytic::GravityEval { potential, acceleration })
    }
}

/// Saved pieces of one pipeline pass needed by the reverse sweep.
pub(crate) struct Trace<J: Jet> {
    r: J,
    u_nn: J,
    inv_n: Option<J>,
    u_hat_nn: J,
    blend: Option<BlendTrace<J>>,
    pub(crate) u_hat: J,
    fused: bool,
}

struct BlendTrace<J: Jet> {
    arg: J,
    h: J,
    u_target: J,
}

fn blend_weight<J: Jet>(r: J, params: &MlpParams) -> (J, J) {
    let k = params.blend_k();
    let r_ref = params.blend_r_ref();
    let arg = (r - J::constant(r_ref)).scale(k);
    let h = (J::constant(1.0) + tanh(arg)).scale(0.5);
    (arg, h)
}

fn transition_jet<J: Jet>(r: J, k: f64, r_ref: f64) -> J {
    let arg = (r - J::constant(r_ref)).scale(k);
    (J::constant(1.0) + tanh(arg)).scale(0.5)
}

/// The smooth blending weight `H(r) = (1 + tanh(k (r - r_ref))) / 2`.
pub fn transition(r: f64, k: f64, r_ref: f64) -> f64 {
    0.5 * (1.0 + (k * (r - r_ref)).tanh())
}

/// Proxy-potential unscaling: divide the network output by
/// `n(r) = 1 (r < 1) or r (r >= 1)`.
pub fn unscale_proxy(u_nn: f64, r_nd: f64) -> f64 {
    if r_nd < 1.0 {
        u_nn
    } else {
        u_nn / r_nd
    }
}

/// Bounded features and their exact 5x3 Jacobian with respect to the
/// non-dimensional coordinates (exterior branch at the r = 1 seam).
pub fn features(x_nd: &Vector3<f64>) -> Result<(FeatureVector, [[f64; 3]; 5]), PinnError> {
    if x_nd.norm() == 0.0 {
        return Err(PinnError::Singularity);
    }
    let xj = [
        Grad3::variable(x_nd.x, 0),
        Grad3::variable(x_nd.y, 1),
        Grad3::variable(x_nd.z, 2),
    ];
    let r = sqrt(xj[0] * xj[0] + xj[1] * xj[1] + xj[2] * xj[2]);
    let inv_r = recip(r);
    let (r_i, r_e) = if r.value() < 1.0 {
        (r, Grad3::constant(1.0))
    } else {
        (Grad3::constant(1.0), inv_r)
    };
    let jets = [r_i, r_e, xj[0] * inv_r, xj[1] * inv_r, xj[2] * inv_r];
    let mut jac = [[0.0; 3]; 5];
    for (row, jet) in jac.iter_mut().zip(&jets) {
        *row = [jet.comp(1), jet.comp(2), jet.comp(3)];
    }
    Ok((
        FeatureVector {
            r_i: jets[0].value(),
            r_e: jets[1].value(),
            s: jets[2].value(),
            t: jets[3].value(),
            u: jets[4].value(),
        },
        jac,
    ))
}
