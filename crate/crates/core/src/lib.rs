//! Gravity-field modeling toolkit.
//!
//! The crate covers the full small-body gravity modeling workflow:
//!
//! - [`geometry`]: triangulated shape models, containment queries, and spatial
//!   sampling.
//! - [`analytic`]: point-mass, spherical-harmonic, polyhedral, and mascon
//!   gravity models, plus a heterogeneous-density truth field built from a
//!   constant-density polyhedron with embedded point-mass anomalies.
//! - [`network`]: the gated multilayer perceptron and the forward/reverse
//!   automatic differentiation it needs for losses defined on field gradients.
//! - [`pinn`]: the physics-informed gravity model pipeline —
//!   non-dimensionalization, bounded radial features, proxy-potential
//!   unscaling, boundary blending, and low-fidelity model fusion.
//! - [`training`]: Adam optimization with plateau scheduling, early stopping,
//!   noise injection, and a direct position-to-acceleration baseline network.
//! - [`regress`]: classical regressions — Kaula-regularized recursive least
//!   squares for Stokes coefficients, batched mascon fitting, and extreme
//!   learning machines.
//! - [`evalsuite`]: the seven-metric evaluation harness and the rotating-body
//!   orbit propagator behind the trajectory metrics.
//! - [`cli`]: experiment configuration and the subcommand entry points used by
//!   the `gravkit` binary.

pub mod analytic;
pub mod cli;
pub mod evalsuite;
pub mod geometry;
pub mod network;
pub mod pinn;
pub mod regress;
pub mod training;

pub use analytic::GravityEval;
pub use geometry::{BodyProperties, ShapeModel};
