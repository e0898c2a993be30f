//! Classical gravity models and the heterogeneous-density truth field.
//!
//! Sign convention used throughout the crate: potentials are positive
//! (`U = mu/r` for a point mass) and the acceleration is the physical
//! attraction, so `a = +grad(U)` numerically. Every model keeps potential and
//! acceleration consistent under that relation, which the test suites check
//! by central finite differences.

pub mod harmonics;
pub mod mascon;
pub mod oracle;
pub mod polyhedral;

use nalgebra::Vector3;
use thiserror::Error;

pub use harmonics::SphericalHarmonicModel;
pub use mascon::{HeterogeneousTruthModel, MasconModel};
pub use polyhedral::PolyhedralModel;

/// Newtonian gravitational constant [m^3 kg^-1 s^-2].
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("field point coincides with a singular source at {x:?}")]
    Singularity { x: Vector3<f64> },
    #[error("field point on polyhedron edge {edge} (endpoints {v0}, {v1})")]
    EdgeSingularity { edge: usize, v0: usize, v1: usize },
    #[error("field point on polyhedron facet {facet}")]
    FacetSingularity { facet: usize },
    #[error("coefficient file parse error on line {line}: {msg}")]
    CoefficientParse { line: usize, msg: String },
}

/// Potential and acceleration of a gravity model at one field point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityEval {
    /// Potential [length^2/time^2], positive convention.
    pub potential: f64,
    /// Attraction [length/time^2].
    pub acceleration: Vector3<f64>,
}

impl GravityEval {
    pub const ZERO: Self = Self {
        potential: 0.0,
        acceleration: Vector3::new(0.0, 0.0, 0.0),
    };
}

impl std::ops::Add for GravityEval {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            potential: self.potential + rhs.potential,
            acceleration: self.acceleration + rhs.acceleration,
        }
    }
}

/// A gravity model that can be evaluated at a field point.
///
/// Implementations must be pure and safe to call concurrently.
pub trait GravityField: Sync {
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError>;

    fn acceleration(&self, x: &Vector3<f64>) -> Result<Vector3<f64>, AnalyticError> {
        Ok(self.eval(x)?.acceleration)
    }

    fn potential(&self, x: &Vector3<f64>) -> Result<f64, AnalyticError> {
        Ok(self.eval(x)?.potential)
    }
}

/// Point-mass evaluation: `U = mu/|x|`, `a = -mu x / |x|^3`.
pub fn pm_eval(mu: f64, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
    let r = x.norm();
    if r == 0.0 {
        return Err(AnalyticError::Singularity { x: *x });
    }
    Ok(GravityEval {
        potential: mu / r,
        acceleration: -mu * x / (r * r * r),
    })
}

/// Point mass at the origin.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct PointMassModel {
    pub mu: f64,
}

impl GravityField for PointMassModel {
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
        pm_eval(self.mu, x)
    }
}


#[cfg(test)]
mod tests;
